#ifndef ISING_CHAIN_HPP
#define ISING_CHAIN_HPP

#include <bit>
#include <cstdint>
#include <vector>

namespace ising {

// Z2 chain over an indexed edge set (disorder lines, cuts, crossing records).
class Chain {
 public:
  Chain() = default;
  explicit Chain(int n_bits) : n_(n_bits), w_((n_bits + 63) / 64, 0) {}

  int size() const { return n_; }
  bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
  void flip(int i) { w_[i >> 6] ^= (1ull << (i & 63)); }
  void set(int i) { w_[i >> 6] |= (1ull << (i & 63)); }
  bool empty() const {
    for (auto v : w_)
      if (v) return false;
    return true;
  }
  int count() const {
    int c = 0;
    for (auto v : w_) c += std::popcount(v);
    return c;
  }
  Chain& operator^=(const Chain& o) {
    for (size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
    return *this;
  }
  friend Chain operator^(Chain a, const Chain& b) { return a ^= b; }
  int intersection_count(const Chain& o) const {
    int c = 0;
    for (size_t i = 0; i < w_.size(); ++i) c += std::popcount(w_[i] & o.w_[i]);
    return c;
  }
  friend bool operator==(const Chain& a, const Chain& b) {
    return a.n_ == b.n_ && a.w_ == b.w_;
  }
  std::vector<int> indices() const {
    std::vector<int> out;
    for (int i = 0; i < n_; ++i)
      if (test(i)) out.push_back(i);
    return out;
  }

 private:
  int n_ = 0;
  std::vector<uint64_t> w_;
};

}  // namespace ising

#endif
