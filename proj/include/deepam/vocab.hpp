#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "deepam/errors.hpp"

namespace deepam {

enum class Modality { Api, Word };

// Bidirectional token<->index map with fixed reserved slots.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBos = 2;
  static constexpr int kEos = 3;
  static constexpr std::size_t kReserved = 4;

  Vocabulary() : Vocabulary(Modality::Word) {}

  explicit Vocabulary(Modality m) : modality_(m) {
    index_to_token_ = {"<pad>", "<unk>", "<bos>", "<eos>"};
    for (std::size_t i = 0; i < index_to_token_.size(); ++i)
      token_to_index_[index_to_token_[i]] = static_cast<int>(i);
  }

  Modality modality() const { return modality_; }
  std::size_t size() const { return index_to_token_.size(); }

  int add(const std::string& token) {
    auto it = token_to_index_.find(token);
    if (it != token_to_index_.end()) return it->second;
    int idx = static_cast<int>(index_to_token_.size());
    index_to_token_.push_back(token);
    token_to_index_[token] = idx;
    return idx;
  }

  int lookup(const std::string& token) const {
    auto it = token_to_index_.find(token);
    return it == token_to_index_.end() ? kUnk : it->second;
  }

  bool contains(const std::string& token) const {
    return token_to_index_.count(token) != 0;
  }

  const std::string& token(std::size_t index) const { return index_to_token_.at(index); }

  const std::vector<std::string>& tokens() const { return index_to_token_; }

 private:
  Modality modality_;
  std::unordered_map<std::string, int> token_to_index_;
  std::vector<std::string> index_to_token_;
};

// Frequency-ranked truncation, ties broken lexicographically.
inline Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& sequences,
                                   Modality modality, std::size_t max_size) {
  if (max_size < Vocabulary::kReserved + 1)
    throw config_error("vocabulary max_size must be at least 5");
  if (sequences.empty()) throw data_error("cannot build vocabulary from empty record list");

  std::map<std::string, std::size_t> freq;  // ordered: deterministic
  for (const auto& seq : sequences)
    for (const auto& tok : seq) ++freq[tok];

  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary vocab(modality);
  const std::size_t keep = max_size - Vocabulary::kReserved;
  for (std::size_t i = 0; i < ranked.size() && i < keep; ++i) vocab.add(ranked[i].first);
  return vocab;
}

}  // namespace deepam
