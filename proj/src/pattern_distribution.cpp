#include "gibbslab/pattern_distribution.hpp"

#include <stdexcept>

namespace gibbslab {
namespace {

bool dense_eligible(int alphabet, std::size_t sites) {
  return code_fits(alphabet, sites) && pattern_space_size(alphabet, sites) <= PatternDistribution::kDenseLimit;
}

}  // namespace

PatternDistribution::PatternDistribution(int alphabet, std::size_t pattern_sites, int radius, Kind kind,
                                         std::uint64_t samples)
    : alphabet_(alphabet), sites_(pattern_sites), radius_(radius), kind_(kind), samples_(samples) {
  if (alphabet < 2) throw std::invalid_argument("alphabet size must be >= 2");
  if (dense_eligible(alphabet, pattern_sites)) dense_.assign(pattern_space_size(alphabet, pattern_sites), 0.0);
}

PatternDistribution PatternDistribution::from_dense(int alphabet, std::size_t pattern_sites, int radius,
                                                    std::vector<double> probs, Kind kind, std::uint64_t samples) {
  if (probs.size() != pattern_space_size(alphabet, pattern_sites))
    throw std::invalid_argument("dense table size does not match pattern space");
  PatternDistribution d(alphabet, pattern_sites, radius, kind, samples);
  if (d.is_dense()) {
    d.dense_ = std::move(probs);
  } else {
    std::vector<Symbol> sym(pattern_sites);
    for (std::uint64_t c = 0; c < probs.size(); ++c) {
      if (probs[c] == 0.0) continue;
      decode_symbols(c, alphabet, sym);
      d.sparse_[sym] = probs[c];
    }
  }
  return d;
}

double PatternDistribution::probability(std::span<const Symbol> pattern) const {
  if (pattern.size() != sites_) throw std::invalid_argument("pattern size does not match distribution");
  if (is_dense()) return dense_[encode_symbols(pattern, alphabet_)];
  auto it = sparse_.find(std::vector<Symbol>(pattern.begin(), pattern.end()));
  return it == sparse_.end() ? 0.0 : it->second;
}

double PatternDistribution::probability(std::uint64_t code) const {
  if (is_dense()) {
    if (code >= dense_.size()) throw std::out_of_range("pattern code out of range");
    return dense_[code];
  }
  return probability(decode_symbols(code, sites_, alphabet_));
}

void PatternDistribution::add(std::span<const Symbol> pattern, double mass) {
  if (pattern.size() != sites_) throw std::invalid_argument("pattern size does not match distribution");
  if (is_dense())
    dense_[encode_symbols(pattern, alphabet_)] += mass;
  else
    sparse_[std::vector<Symbol>(pattern.begin(), pattern.end())] += mass;
}

double PatternDistribution::total() const {
  double t = 0.0;
  for (double p : dense_) t += p;
  for (const auto& [k, p] : sparse_) t += p;
  return t;
}

void PatternDistribution::scale(double factor) {
  for (double& p : dense_) p *= factor;
  for (auto& [k, p] : sparse_) p *= factor;
}

void PatternDistribution::for_each(const std::function<void(std::span<const Symbol>, double)>& fn) const {
  if (is_dense()) {
    std::vector<Symbol> sym(sites_);
    for (std::uint64_t c = 0; c < dense_.size(); ++c) {
      if (dense_[c] == 0.0) continue;
      decode_symbols(c, alphabet_, sym);
      fn(sym, dense_[c]);
    }
  } else {
    for (const auto& [k, p] : sparse_)
      if (p != 0.0) fn(k, p);
  }
}

bool PatternDistribution::same_shape(const PatternDistribution& other) const {
  return alphabet_ == other.alphabet_ && sites_ == other.sites_ && radius_ == other.radius_;
}

const std::vector<double>& PatternDistribution::dense() const {
  if (!is_dense()) throw std::logic_error("pattern distribution is stored sparsely");
  return dense_;
}

}  // namespace gibbslab
