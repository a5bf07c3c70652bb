#include "gibbslab/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gibbslab {

Site Site::operator+(const Site& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("site dimension mismatch");
  Site r = *this;
  for (std::size_t i = 0; i < coords.size(); ++i) r.coords[i] += other.coords[i];
  return r;
}

Site Site::operator-(const Site& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("site dimension mismatch");
  Site r = *this;
  for (std::size_t i = 0; i < coords.size(); ++i) r.coords[i] -= other.coords[i];
  return r;
}

Site Site::operator-() const {
  Site r = *this;
  for (auto& c : r.coords) c = -c;
  return r;
}

int Site::linf() const {
  int m = 0;
  for (int c : coords) m = std::max(m, std::abs(c));
  return m;
}

int Site::l1() const {
  int s = 0;
  for (int c : coords) s += std::abs(c);
  return s;
}

Site origin(int dim) { return Site(std::vector<int>(static_cast<std::size_t>(dim), 0)); }

Site unit_vector(int dim, int axis) {
  Site e = origin(dim);
  e.coords.at(static_cast<std::size_t>(axis)) = 1;
  return e;
}

std::string to_string(const Site& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.coords.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s.coords[i]);
  }
  return out + ")";
}

std::string_view to_string(Geometry g) {
  switch (g) {
    case Geometry::FixedBoundary: return "fixed";
    case Geometry::Free: return "free";
    case Geometry::Torus: return "torus";
  }
  return "?";
}

Geometry parse_geometry(std::string_view text) {
  if (text == "fixed") return Geometry::FixedBoundary;
  if (text == "free") return Geometry::Free;
  if (text == "torus") return Geometry::Torus;
  throw std::invalid_argument("unknown geometry '" + std::string(text) + "'");
}

Window::Window(int dim, int side, Geometry geometry, int alphabet)
    : dim_(dim), side_(side), geometry_(geometry), alphabet_(alphabet), size_(1) {
  if (dim < 1) throw std::invalid_argument("window dimension must be >= 1");
  if (side < 1) throw std::invalid_argument("window side must be >= 1");
  if (alphabet < 2 || alphabet > 255) throw std::invalid_argument("alphabet size must be in [2, 255]");
  for (int i = 0; i < dim; ++i) {
    if (size_ > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(side))
      throw std::overflow_error("window too large");
    size_ *= static_cast<std::size_t>(side);
  }
}

Window Window::cube(int dim, int radius, Geometry geometry, int alphabet) {
  if (radius < 0) throw std::invalid_argument("radius must be >= 0");
  return Window(dim, 2 * radius + 1, geometry, alphabet);
}

int Window::radius() const {
  if (!is_centered()) throw std::logic_error("even-sided window has no radius");
  return side_ / 2;
}

bool Window::contains(const Site& x) const {
  if (x.dim() != dim_) return false;
  for (int c : x.coords)
    if (c < lo() || c > hi()) return false;
  return true;
}

std::size_t Window::index_of(const Site& x) const {
  if (!contains(x)) throw std::out_of_range("site " + to_string(x) + " outside window");
  std::size_t idx = 0;
  for (int c : x.coords) idx = idx * static_cast<std::size_t>(side_) + static_cast<std::size_t>(c - lo());
  return idx;
}

Site Window::site_at(std::size_t index) const {
  if (index >= size_) throw std::out_of_range("site index out of range");
  Site s(std::vector<int>(static_cast<std::size_t>(dim_)));
  for (int i = dim_ - 1; i >= 0; --i) {
    s.coords[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::size_t>(side_)) + lo();
    index /= static_cast<std::size_t>(side_);
  }
  return s;
}

std::vector<Site> Window::sites() const { return box_sites(dim_, lo(), hi()); }

Site Window::wrap(const Site& x) const {
  Site w = x;
  for (auto& c : w.coords) c = ((c - lo()) % side_ + side_) % side_ + lo();
  return w;
}

std::optional<std::size_t> Window::resolve(const Site& x) const {
  if (contains(x)) return index_of(x);
  if (geometry_ == Geometry::Torus && x.dim() == dim_) return index_of(wrap(x));
  return std::nullopt;
}

std::vector<Site> box_sites(int dim, int radius) {
  if (dim < 1 || radius < 0) throw std::invalid_argument("box_sites requires d >= 1 and n >= 0");
  return box_sites(dim, -radius, radius);
}

std::vector<Site> box_sites(int dim, int lo, int hi) {
  std::vector<Site> out;
  if (hi < lo) return out;
  Site cur(std::vector<int>(static_cast<std::size_t>(dim), lo));
  while (true) {
    out.push_back(cur);
    int axis = dim - 1;
    while (axis >= 0 && cur.coords[static_cast<std::size_t>(axis)] == hi) {
      cur.coords[static_cast<std::size_t>(axis)] = lo;
      --axis;
    }
    if (axis < 0) break;
    ++cur.coords[static_cast<std::size_t>(axis)];
  }
  return out;
}

std::vector<Site> collar_sites(const Window& window, int width) {
  std::vector<Site> out;
  for (auto& s : box_sites(window.dim(), window.lo() - width, window.hi() + width))
    if (!window.contains(s)) out.push_back(std::move(s));
  return out;
}

Boundary Boundary::uniform(Symbol s) {
  Boundary b;
  b.uniform_ = s;
  return b;
}

Boundary Boundary::collar(const Window& window, int width, std::span<const Symbol> values) {
  if (width < 1) throw std::invalid_argument("collar width must be >= 1");
  auto sites = collar_sites(window, width);
  if (sites.size() != values.size()) throw std::invalid_argument("collar value count does not match collar size");
  Boundary b;
  b.width_ = width;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (values[i] >= window.alphabet()) throw std::invalid_argument("collar symbol out of alphabet");
    b.values_.emplace(sites[i], values[i]);
  }
  return b;
}

int Boundary::width() const { return uniform_ ? std::numeric_limits<int>::max() : width_; }

Symbol Boundary::at(const Site& x) const {
  if (uniform_) return *uniform_;
  auto it = values_.find(x);
  if (it == values_.end()) throw std::out_of_range("no boundary spin at " + to_string(x));
  return it->second;
}

std::vector<Symbol> Boundary::collar_values() const {
  std::vector<Symbol> out;
  out.reserve(values_.size());
  for (const auto& [site, s] : values_) out.push_back(s);
  return out;
}

Boundary Boundary::relabeled(std::span<const Symbol> perm) const {
  Boundary b = *this;
  if (b.uniform_) b.uniform_ = perm[*b.uniform_];
  for (auto& [site, s] : b.values_) s = perm[s];
  return b;
}

Configuration::Configuration(Window window, std::vector<Symbol> spins, std::optional<Boundary> boundary)
    : window_(std::move(window)), spins_(std::move(spins)), boundary_(std::move(boundary)) {
  if (spins_.size() != window_.size()) throw std::invalid_argument("spin array length does not match window");
  for (Symbol s : spins_)
    if (s >= window_.alphabet()) throw std::invalid_argument("spin symbol out of alphabet");
  const bool fixed = window_.geometry() == Geometry::FixedBoundary;
  if (fixed != boundary_.has_value())
    throw std::invalid_argument("boundary spins must be present exactly for fixed-boundary windows");
  if (boundary_ && boundary_->uniform_symbol() && *boundary_->uniform_symbol() >= window_.alphabet())
    throw std::invalid_argument("boundary symbol out of alphabet");
}

Configuration Configuration::filled(const Window& window, Symbol s, std::optional<Boundary> boundary) {
  return Configuration(window, std::vector<Symbol>(window.size(), s), std::move(boundary));
}

void Configuration::set(std::size_t i, Symbol s) {
  if (s >= window_.alphabet()) throw std::invalid_argument("spin symbol out of alphabet");
  spins_.at(i) = s;
}

Symbol Configuration::at(const Site& x) const {
  if (auto idx = window_.resolve(x)) return spins_[*idx];
  if (boundary_) return boundary_->at(x);
  throw std::out_of_range("site " + to_string(x) + " outside free window");
}

bool code_fits(int alphabet, std::size_t sites) {
  constexpr std::uint64_t limit = std::numeric_limits<std::int64_t>::max();
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < sites; ++i) {
    if (v > limit / static_cast<std::uint64_t>(alphabet)) return false;
    v *= static_cast<std::uint64_t>(alphabet);
  }
  return true;
}

std::uint64_t pattern_space_size(int alphabet, std::size_t sites) {
  if (!code_fits(alphabet, sites)) throw std::overflow_error("pattern space exceeds 2^63 - 1");
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < sites; ++i) v *= static_cast<std::uint64_t>(alphabet);
  return v;
}

std::uint64_t encode_symbols(std::span<const Symbol> symbols, int alphabet) {
  if (!code_fits(alphabet, symbols.size())) throw std::overflow_error("pattern code exceeds 2^63 - 1");
  std::uint64_t code = 0;
  for (Symbol s : symbols) {
    if (s >= alphabet) throw std::invalid_argument("symbol out of alphabet");
    code = code * static_cast<std::uint64_t>(alphabet) + s;
  }
  return code;
}

void decode_symbols(std::uint64_t code, int alphabet, std::span<Symbol> out) {
  const auto a = static_cast<std::uint64_t>(alphabet);
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = static_cast<Symbol>(code % a);
    code /= a;
  }
}

std::vector<Symbol> decode_symbols(std::uint64_t code, std::size_t count, int alphabet) {
  if (code >= pattern_space_size(alphabet, count)) throw std::out_of_range("pattern code out of range");
  std::vector<Symbol> out(count);
  decode_symbols(code, alphabet, out);
  return out;
}

std::uint64_t Pattern::code() const { return encode_symbols(symbols, alphabet); }

Pattern Pattern::decode(std::uint64_t code, int dim, int radius, int alphabet) {
  std::size_t count = 1;
  for (int i = 0; i < dim; ++i) count *= static_cast<std::size_t>(2 * radius + 1);
  return Pattern{dim, radius, alphabet, decode_symbols(code, count, alphabet)};
}

std::uint64_t pattern_code(const Pattern& p) { return p.code(); }

Pattern pattern_decode(std::uint64_t code, int dim, int radius, int alphabet) {
  return Pattern::decode(code, dim, radius, alphabet);
}

Pattern shift_window(const Configuration& omega, const Site& x, int k) {
  const Window& w = omega.window();
  if (k < 0) throw std::invalid_argument("sub-radius must be >= 0");
  Pattern p{w.dim(), k, w.alphabet(), {}};
  for (const Site& y : box_sites(w.dim(), k)) {
    auto idx = w.resolve(y + x);
    if (!idx) throw std::out_of_range("shifted pattern leaves the window at " + to_string(y + x));
    p.symbols.push_back(omega[*idx]);
  }
  return p;
}

std::size_t hamming_distance(std::span<const Symbol> a, std::span<const Symbol> b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming distance of arrays with different lengths");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

std::size_t hamming_distance(const Configuration& omega, const Configuration& eta) {
  if (!(omega.window() == eta.window())) throw std::invalid_argument("hamming distance across different windows");
  return hamming_distance(omega.spins(), eta.spins());
}

std::string to_text(const Configuration& omega) {
  const Window& w = omega.window();
  std::ostringstream os;
  os << w.dim() << ' ' << w.side() / 2 << ' ' << to_string(w.geometry()) << ' ' << w.alphabet();
  if (!w.is_centered()) os << ' ' << w.side();
  os << '\n';
  for (std::size_t i = 0; i < omega.spins().size(); ++i) {
    if (i) os << ' ';
    os << static_cast<int>(omega[i]);
  }
  os << '\n';
  if (const auto& b = omega.boundary()) {
    if (b->is_uniform()) {
      os << "boundary uniform " << static_cast<int>(*b->uniform_symbol()) << '\n';
    } else {
      os << "boundary collar " << b->width();
      for (Symbol s : b->collar_values()) os << ' ' << static_cast<int>(s);
      os << '\n';
    }
  }
  return os.str();
}

Configuration configuration_from_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string header;
  if (!std::getline(is, header)) throw std::invalid_argument("configuration text: missing header");
  std::istringstream hs(header);
  int d = 0, n = 0, alphabet = 0;
  std::string geom;
  if (!(hs >> d >> n >> geom >> alphabet)) throw std::invalid_argument("configuration text: malformed header");
  int side = 2 * n + 1;
  if (int even_side; hs >> even_side) side = even_side;
  Window w(d, side, parse_geometry(geom), alphabet);

  std::string spin_line;
  if (!std::getline(is, spin_line)) throw std::invalid_argument("configuration text: missing spin line");
  std::istringstream ss(spin_line);
  std::vector<Symbol> spins;
  for (int v; ss >> v;) {
    if (v < 0 || v >= alphabet) throw std::invalid_argument("configuration text: symbol out of range");
    spins.push_back(static_cast<Symbol>(v));
  }

  std::optional<Boundary> boundary;
  std::string bline;
  if (std::getline(is, bline) && !bline.empty()) {
    std::istringstream bs(bline);
    std::string tag, kind;
    bs >> tag >> kind;
    if (tag != "boundary") throw std::invalid_argument("configuration text: expected boundary line");
    if (kind == "uniform") {
      int s = -1;
      if (!(bs >> s) || s < 0 || s >= alphabet) throw std::invalid_argument("configuration text: bad boundary symbol");
      boundary = Boundary::uniform(static_cast<Symbol>(s));
    } else if (kind == "collar") {
      int width = 0;
      bs >> width;
      std::vector<Symbol> values;
      for (int v; bs >> v;) values.push_back(static_cast<Symbol>(v));
      boundary = Boundary::collar(w, width, values);
    } else {
      throw std::invalid_argument("configuration text: unknown boundary kind '" + kind + "'");
    }
  }
  return Configuration(w, std::move(spins), std::move(boundary));
}

}  // namespace gibbslab
