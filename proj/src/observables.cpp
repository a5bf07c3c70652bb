#include "gibbslab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "gibbslab/defaults.hpp"
#include "gibbslab/parallel.hpp"

namespace gibbslab {
namespace {

Site shifted(const Site& s, const Site& shift) { return shift.coords.empty() ? s : s + shift; }

void check_sites(int dim, const std::vector<Site>& sites) {
  std::set<Site> seen;
  for (const auto& s : sites) {
    if (s.dim() != dim) throw std::invalid_argument("dependence site has the wrong dimension");
    if (!seen.insert(s).second) throw std::invalid_argument("repeated site in dependence set " + to_string(s));
  }
}

std::uint64_t table_size(int alphabet, std::size_t sites) {
  if (sites > kMaxTableSites)
    throw DependenceTooLarge("dependence set of " + std::to_string(sites) + " sites exceeds the " +
                             std::to_string(kMaxTableSites) + "-site table limit");
  return pattern_space_size(alphabet, sites);
}

}  // namespace

LocalFunction LocalFunction::table(std::string name, int dim, std::vector<Site> dependence, int alphabet,
                                   std::vector<double> values) {
  check_sites(dim, dependence);
  if (values.size() != table_size(alphabet, dependence.size()))
    throw std::invalid_argument("table size does not match |S|^|dependence|");
  LocalFunction f;
  f.name_ = std::move(name);
  f.dim_ = dim;
  f.alphabet_ = alphabet;
  f.dependence_ = std::move(dependence);
  f.table_ = std::move(values);
  return f;
}

LocalFunction LocalFunction::from_callable(std::string name, int dim, std::vector<Site> dependence, int alphabet,
                                           const std::function<double(std::span<const Symbol>)>& fn) {
  const auto size = table_size(alphabet, dependence.size());
  std::vector<double> values(size);
  std::vector<Symbol> buf(dependence.size());
  for (std::uint64_t code = 0; code < size; ++code) {
    decode_symbols(code, alphabet, buf);
    values[code] = fn(buf);
  }
  return table(std::move(name), dim, std::move(dependence), alphabet, std::move(values));
}

LocalFunction LocalFunction::additive(std::string name, int dim, std::vector<Site> dependence, int alphabet,
                                      std::vector<std::vector<double>> per_site, double constant) {
  check_sites(dim, dependence);
  if (per_site.size() != dependence.size()) throw std::invalid_argument("one per-site table per dependence site");
  for (const auto& g : per_site)
    if (g.size() != static_cast<std::size_t>(alphabet)) throw std::invalid_argument("per-site table must have |S| entries");
  LocalFunction f;
  f.name_ = std::move(name);
  f.dim_ = dim;
  f.alphabet_ = alphabet;
  f.dependence_ = std::move(dependence);
  f.per_site_ = std::move(per_site);
  f.constant_ = constant;
  return f;
}

double LocalFunction::evaluate(std::span<const Symbol> restricted) const {
  if (restricted.size() != dependence_.size()) throw std::invalid_argument("wrong number of symbols for local function");
  if (is_table()) return table_[encode_symbols(restricted, alphabet_)];
  double v = constant_;
  for (std::size_t i = 0; i < restricted.size(); ++i) v += per_site_[i][restricted[i]];
  return v;
}

double LocalFunction::operator()(const Configuration& omega, const Site& shift) const {
  std::vector<Symbol> buf(dependence_.size());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = omega.at(shifted(dependence_[i], shift));
  return evaluate(buf);
}

double LocalFunction::operator()(const Configuration& omega) const { return (*this)(omega, Site{}); }

std::optional<LocalFunction> LocalFunction::as_additive() const {
  if (is_additive()) return *this;
  if (dependence_.size() != 1) return std::nullopt;
  return additive(name_, dim_, dependence_, alphabet_, {table_}, 0.0);
}

LocalFunction LocalFunction::scaled(double factor, std::string name) const {
  LocalFunction f = *this;
  f.name_ = std::move(name);
  for (double& v : f.table_) v *= factor;
  for (auto& g : f.per_site_)
    for (double& v : g) v *= factor;
  f.constant_ *= factor;
  return f;
}

BoundFunction::BoundFunction(const LocalFunction& f, const Window& window, const std::optional<Boundary>& boundary,
                             const Site& shift)
    : f_(&f), index_(f.dependence().size()), fixed_(f.dependence().size()) {
  for (std::size_t i = 0; i < index_.size(); ++i) {
    const Site x = shifted(f.dependence()[i], shift);
    if (auto idx = window.resolve(x)) {
      index_[i] = static_cast<std::int64_t>(*idx);
    } else if (boundary) {
      index_[i] = -1;
      fixed_[i] = boundary->at(x);
    } else {
      throw std::out_of_range("local function reads " + to_string(x) + " outside a free window");
    }
  }
}

double BoundFunction::operator()(std::span<const Symbol> spins) const {
  std::vector<Symbol> buf(index_.size());
  for (std::size_t i = 0; i < buf.size(); ++i)
    buf[i] = index_[i] >= 0 ? spins[static_cast<std::size_t>(index_[i])] : fixed_[i];
  return f_->evaluate(buf);
}

LocalFunction site_spin(int dim, const Site& x) {
  return LocalFunction::table("omega_" + to_string(x), dim, {x}, 2, {-1.0, 1.0});
}

LocalFunction site_spin(int dim) { return site_spin(dim, origin(dim)); }

LocalFunction spin_product(int dim, std::vector<Site> sites) {
  std::string name = "prod";
  for (const auto& s : sites) name += "_" + to_string(s);
  return LocalFunction::from_callable(name, dim, std::move(sites), 2, [](std::span<const Symbol> s) {
    double v = 1.0;
    for (Symbol x : s) v *= ising_value(x);
    return v;
  });
}

LocalFunction constant_function(int dim, int alphabet, double c) {
  return LocalFunction::additive("constant", dim, {}, alphabet, {}, c);
}

LocalFunction magnetization(int dim, const std::vector<Site>& sites, bool normalized) {
  const double w = normalized && !sites.empty() ? 1.0 / static_cast<double>(sites.size()) : 1.0;
  return LocalFunction::additive(normalized ? "block_mean" : "magnetization", dim, sites, 2,
                                 std::vector<std::vector<double>>(sites.size(), {-w, w}));
}

LocalFunction pattern_indicator(int dim, int alphabet, std::vector<Site> sites, std::vector<Symbol> pattern) {
  if (pattern.size() != sites.size()) throw std::invalid_argument("pattern length must match the site list");
  const auto target = encode_symbols(pattern, alphabet);
  std::vector<double> values(table_size(alphabet, sites.size()), 0.0);
  values[target] = 1.0;
  return LocalFunction::table("indicator", dim, std::move(sites), alphabet, std::move(values));
}

double OscillationVector::at(const Site& x) const {
  for (std::size_t i = 0; i < sites.size(); ++i)
    if (sites[i] == x) return delta[i];
  return 0.0;
}

namespace {

double site_oscillation(const LocalFunction& f, std::size_t i) {
  if (f.is_additive()) {
    const auto& g = f.per_site()[i];
    return *std::max_element(g.begin(), g.end()) - *std::min_element(g.begin(), g.end());
  }
  const auto a = static_cast<std::uint64_t>(f.alphabet());
  const std::size_t m = f.dependence().size();
  std::uint64_t stride = 1;
  for (std::size_t j = i + 1; j < m; ++j) stride *= a;
  const auto& t = f.values();
  double best = 0.0;
  for (std::uint64_t code = 0; code < t.size(); ++code) {
    if ((code / stride) % a != 0) continue;
    double lo = t[code], hi = t[code];
    for (std::uint64_t s = 1; s < a; ++s) {
      lo = std::min(lo, t[code + s * stride]);
      hi = std::max(hi, t[code + s * stride]);
    }
    best = std::max(best, hi - lo);
  }
  return best;
}

OscillationVector finish(const LocalFunction& f, std::vector<double> delta) {
  OscillationVector v;
  v.sites = f.dependence();
  v.delta = std::move(delta);
  for (double d : v.delta) {
    v.l1 += d;
    v.l2sq += d * d;
  }
  return v;
}

}  // namespace

OscillationVector oscillation_vector(const LocalFunction& f) {
  const auto m = static_cast<std::int64_t>(f.dependence().size());
  std::vector<double> delta(f.dependence().size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < m; ++i) delta[static_cast<std::size_t>(i)] = site_oscillation(f, static_cast<std::size_t>(i));
  return finish(f, std::move(delta));
}

OscillationVector oscillation_vector_serial(const LocalFunction& f) {
  std::vector<double> delta(f.dependence().size());
  for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = site_oscillation(f, i);
  return finish(f, std::move(delta));
}

LocalFunction block_sum(const LocalFunction& f, const Window& lambda) {
  if (lambda.dim() != f.dim()) throw std::invalid_argument("block sum window has the wrong dimension");
  const bool torus = lambda.geometry() == Geometry::Torus;
  const auto anchors = lambda.sites();
  auto place = [&](const Site& x, const Site& s) { return torus ? lambda.wrap(x + s) : x + s; };
  const std::string name = "S[" + f.name() + "]";

  if (auto add = f.as_additive()) {
    std::map<Site, std::vector<double>> acc;
    for (const auto& x : anchors)
      for (std::size_t i = 0; i < add->dependence().size(); ++i) {
        auto& g = acc.try_emplace(place(x, add->dependence()[i]), std::vector<double>(f.alphabet(), 0.0)).first->second;
        for (int s = 0; s < f.alphabet(); ++s) g[s] += add->per_site()[i][s];
      }
    std::vector<Site> dep;
    std::vector<std::vector<double>> tables;
    for (auto& [site, g] : acc) {
      dep.push_back(site);
      tables.push_back(std::move(g));
    }
    return LocalFunction::additive(name, f.dim(), std::move(dep), f.alphabet(), std::move(tables),
                                   add->constant() * static_cast<double>(anchors.size()));
  }

  std::set<Site> union_set;
  for (const auto& x : anchors)
    for (const auto& s : f.dependence()) union_set.insert(place(x, s));
  if (union_set.size() > kMaxTableSites)
    throw DependenceTooLarge("block sum dependence set has " + std::to_string(union_set.size()) +
                             " sites; beyond the table limit");
  std::vector<Site> dep(union_set.begin(), union_set.end());
  const std::size_t m = f.dependence().size();
  std::vector<std::size_t> pos(anchors.size() * m);
  for (std::size_t a = 0; a < anchors.size(); ++a)
    for (std::size_t i = 0; i < m; ++i)
      pos[a * m + i] = static_cast<std::size_t>(
          std::lower_bound(dep.begin(), dep.end(), place(anchors[a], f.dependence()[i])) - dep.begin());

  const auto size = table_size(f.alphabet(), dep.size());
  std::vector<double> values(size);
  const auto chunks = static_cast<std::int64_t>(chunk_count(size));
#pragma omp parallel
  {
    std::vector<Symbol> full(dep.size()), sub(m);
#pragma omp for schedule(static)
    for (std::int64_t c = 0; c < chunks; ++c) {
      const std::uint64_t begin = static_cast<std::uint64_t>(c) * kReductionChunk;
      const std::uint64_t end = std::min(size, begin + kReductionChunk);
      for (std::uint64_t code = begin; code < end; ++code) {
        decode_symbols(code, f.alphabet(), full);
        double v = 0.0;
        for (std::size_t a = 0; a < anchors.size(); ++a) {
          for (std::size_t i = 0; i < m; ++i) sub[i] = full[pos[a * m + i]];
          v += f.evaluate(sub);
        }
        values[code] = v;
      }
    }
  }
  return LocalFunction::table(name, f.dim(), std::move(dep), f.alphabet(), std::move(values));
}

InequalityCheck young_bound_check(const LocalFunction& f, const Window& lambda) {
  InequalityCheck r;
  r.lhs = oscillation_vector(block_sum(f, lambda)).l2sq;
  const double l1 = oscillation_vector(f).l1;
  r.rhs = static_cast<double>(lambda.size()) * l1 * l1;
  r.ok = r.lhs <= r.rhs * (1.0 + 1e-12);
  return r;
}

PatternDistribution empirical_frequency(const Configuration& omega, int k) {
  const Window& w = omega.window();
  if (!w.is_centered()) throw std::invalid_argument("pattern frequencies need a centered window Lambda_n");
  const int n = w.radius();
  if (k < 0 || k >= n) throw std::invalid_argument("pattern frequencies need 0 <= k < n");
  const auto offsets = box_sites(w.dim(), k);
  const auto anchors = box_sites(w.dim(), n - k);
  PatternDistribution dist(w.alphabet(), offsets.size(), k, PatternDistribution::Kind::Empirical, anchors.size());
  std::vector<Symbol> buf(offsets.size());
  for (const auto& x : anchors) {
    for (std::size_t i = 0; i < offsets.size(); ++i) buf[i] = omega[w.index_of(x + offsets[i])];
    dist.add(buf, 1.0);
  }
  dist.scale(1.0 / static_cast<double>(anchors.size()));
  return dist;
}

double tv_distance(const PatternDistribution& p, const PatternDistribution& q) {
  if (!p.same_shape(q)) throw std::invalid_argument("total variation needs distributions over the same patterns");
  double s = 0.0;
  p.for_each([&](std::span<const Symbol> pat, double pv) { s += std::abs(pv - q.probability(pat)); });
  q.for_each([&](std::span<const Symbol> pat, double qv) {
    if (p.probability(pat) == 0.0) s += qv;
  });
  return 0.5 * s;
}

int n_breve(int d, int k) {
  if (d < 1 || k < 0) throw std::invalid_argument("n_breve needs d >= 1 and k >= 0");
  for (int n = k + 1;; ++n) {
    const long double ratio = std::pow(static_cast<long double>(2 * n + 1) / (2 * (n - k) + 1), d);
    if (ratio <= static_cast<long double>(defaults::kVolumeRatioCeiling)) return n;
  }
}

double shields_rho(double epsilon, int d, int k) { return defaults::shields_rho(epsilon, d, k); }

ShieldsCheck shields_bound_check(const Configuration& omega, const Configuration& eta, int k,
                                 std::optional<double> epsilon) {
  const Window& w = omega.window();
  if (!(w == eta.window())) throw std::invalid_argument("configurations live on different windows");
  const int d = w.dim();
  const int n = w.radius();
  ShieldsCheck r;
  r.tv = tv_distance(empirical_frequency(omega, k), empirical_frequency(eta, k));
  r.hamming = hamming_distance(omega.spins(), eta.spins());
  const double pattern_vol = std::pow(2.0 * k + 1.0, d);
  const double vol = std::pow(2.0 * n + 1.0, d);
  r.bound = pattern_vol / std::pow(2.0 * (n - k) + 1.0, d) * static_cast<double>(r.hamming);
  r.n_breve = n_breve(d, k);
  r.epsilon = epsilon ? *epsilon : 5.0 * pattern_vol * static_cast<double>(r.hamming) / (2.0 * vol);
  r.rho = shields_rho(r.epsilon, d, k);
  r.lemma_applies = n >= r.n_breve && static_cast<double>(r.hamming) <= r.rho * vol * (1.0 + 1e-12);
  r.lemma_ok = !r.lemma_applies || r.tv <= r.epsilon / 2.0 + 1e-12;
  r.ok = r.tv <= r.bound + 1e-12 && r.lemma_ok;
  return r;
}

}  // namespace gibbslab
