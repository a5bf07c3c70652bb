#include "gibbslab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace gibbslab {
namespace {

Json number_or_inf(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "+inf" : (v < 0 ? "-inf" : "nan");
}

std::string boundary_line(const std::optional<Boundary>& b) {
  if (!b) return "none";
  std::ostringstream os;
  if (b->is_uniform()) {
    os << "uniform " << static_cast<int>(*b->uniform_symbol());
  } else {
    os << "collar " << b->width();
    for (Symbol s : b->collar_values()) os << ' ' << static_cast<int>(s);
  }
  return os.str();
}

std::string csv_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ModelParams parse_model(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("model config must be a JSON object");
  static const std::set<std::string> known{"model", "beta", "h", "J", "N", "alpha", "R", "d"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw std::invalid_argument("unknown model key '" + key + "'");
  if (!j.contains("model")) throw std::invalid_argument("model config needs a 'model' key");
  ModelParams p;
  const auto kind = j.at("model").get<std::string>();
  if (kind == "ising")
    p.model = ModelKind::Ising;
  else if (kind == "potts")
    p.model = ModelKind::Potts;
  else if (kind == "dyson")
    p.model = ModelKind::Dyson;
  else
    throw std::invalid_argument("unknown model '" + kind + "'");
  auto num = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw std::invalid_argument(std::string("model key '") + key + "' must be a number");
    return j.at(key).get<double>();
  };
  auto integer = [&](const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) throw std::invalid_argument(std::string("model key '") + key + "' must be an integer");
    return j.at(key).get<int>();
  };
  p.d = integer("d", 1);
  p.beta = num("beta", 0.0);
  p.h = num("h", 0.0);
  p.J = num("J", 1.0);
  p.N = integer("N", 2);
  p.alpha = num("alpha", 2.0);
  p.R = integer("R", 1);
  if (p.d < 1) throw std::invalid_argument("d must be >= 1");
  if (!(p.beta >= 0.0) || !std::isfinite(p.beta)) throw std::invalid_argument("beta must be finite and >= 0");
  if (p.N < 2) throw std::invalid_argument("Potts needs N >= 2");
  if (!(p.alpha > 1.0)) throw std::invalid_argument("Dyson needs alpha > 1");
  if (p.R < 1) throw std::invalid_argument("Dyson needs R >= 1");
  if (p.model == ModelKind::Dyson && p.d != 1) throw std::invalid_argument("the Dyson model lives in d = 1");
  if (p.model != ModelKind::Ising && (j.contains("h") || j.contains("J")))
    throw std::invalid_argument("'h' and 'J' apply to the Ising model only");
  if (p.model != ModelKind::Potts && j.contains("N")) throw std::invalid_argument("'N' applies to the Potts model only");
  if (p.model != ModelKind::Dyson && (j.contains("alpha") || j.contains("R")))
    throw std::invalid_argument("'alpha' and 'R' apply to the Dyson model only");
  return p;
}

ModelParams parse_model_text(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(std::string("model config is not valid JSON: ") + e.what());
  }
  return parse_model(j);
}

Json to_json(const ModelParams& p) {
  Json j;
  j["model"] = std::string(to_string(p.model));
  j["d"] = p.d;
  j["beta"] = p.beta;
  switch (p.model) {
    case ModelKind::Ising:
      j["h"] = p.h;
      j["J"] = p.J;
      break;
    case ModelKind::Potts:
      j["N"] = p.N;
      break;
    case ModelKind::Dyson:
      j["alpha"] = p.alpha;
      j["R"] = p.R;
      break;
  }
  return j;
}

std::string export_measure(const FiniteGibbsMeasure& mu) {
  std::ostringstream os;
  const auto& w = mu.window;
  os << "# gibbslab exact measure\n";
  os << "# model " << (mu.potential.params() ? to_json(*mu.potential.params()).dump() : std::string("null")) << '\n';
  os << "# potential " << mu.potential.name() << '\n';
  os << "# window " << w.dim() << ' ' << w.side() << ' ' << to_string(w.geometry()) << ' ' << w.alphabet() << '\n';
  os << "# boundary " << boundary_line(mu.boundary) << '\n';
  os << "# log_z " << format_double(mu.log_z) << '\n';
  os << "# code probability\n";
  for (std::size_t i = 0; i < mu.probs.size(); ++i) os << i << ' ' << format_double(mu.probs[i]) << '\n';
  return os.str();
}

FiniteGibbsMeasure import_measure(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  std::optional<ModelParams> params;
  std::optional<Window> window;
  std::optional<Boundary> boundary;
  double log_z = 0.0;
  std::vector<double> probs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string key;
      ls >> key;
      std::string rest;
      std::getline(ls >> std::ws, rest);
      if (key == "model") {
        if (rest == "null") throw std::invalid_argument("measure file has no model parameters to rebuild the potential");
        params = parse_model_text(rest);
      } else if (key == "window") {
        std::istringstream ws(rest);
        int d, side, alphabet;
        std::string geom;
        if (!(ws >> d >> side >> geom >> alphabet)) throw std::invalid_argument("measure file: malformed window line");
        window.emplace(d, side, parse_geometry(geom), alphabet);
      } else if (key == "boundary") {
        std::istringstream bs(rest);
        std::string kind;
        bs >> kind;
        if (kind == "uniform") {
          int s;
          bs >> s;
          boundary = Boundary::uniform(static_cast<Symbol>(s));
        } else if (kind == "collar") {
          if (!window) throw std::invalid_argument("measure file: boundary before window");
          int width;
          bs >> width;
          std::vector<Symbol> values;
          for (int v; bs >> v;) values.push_back(static_cast<Symbol>(v));
          boundary = Boundary::collar(*window, width, values);
        } else if (kind != "none") {
          throw std::invalid_argument("measure file: unknown boundary kind '" + kind + "'");
        }
      } else if (key == "log_z") {
        log_z = std::strtod(rest.c_str(), nullptr);
      }
      continue;
    }
    std::istringstream ls(line);
    std::uint64_t code;
    std::string value;
    if (!(ls >> code >> value)) throw std::invalid_argument("measure file: malformed row '" + line + "'");
    if (code != probs.size()) throw std::invalid_argument("measure file: rows must list codes 0, 1, 2, ... in order");
    probs.push_back(std::strtod(value.c_str(), nullptr));
  }
  if (!params || !window) throw std::invalid_argument("measure file: missing model or window header");
  if (probs.size() != state_count(*window, std::numeric_limits<std::uint64_t>::max()))
    throw std::invalid_argument("measure file: row count does not match the window");
  return FiniteGibbsMeasure{*window, boundary, make_potential(*params), std::move(probs), log_z};
}

std::string pattern_table(const PatternDistribution& p) {
  std::ostringstream os;
  os << "# code probability\n";
  p.for_each([&](std::span<const Symbol> pat, double v) {
    os << encode_symbols(pat, p.alphabet()) << ' ' << format_double(v) << '\n';
  });
  return os.str();
}

Json to_json(const Site& s) { return s.coords; }

Json to_json(const DobrushinReport& r) {
  Json j;
  j["c"] = r.c;
  j["satisfied"] = r.satisfied;
  j["D"] = r.D ? Json(*r.D) : Json(nullptr);
  Json row = Json::array();
  for (const auto& e : r.row) row.push_back({{"y", to_json(e.y)}, {"value", e.value}});
  j["row"] = row;
  return j;
}

Json to_json(const GcbTestReport& r) {
  Json j;
  j["mode"] = r.exact ? "exact" : "empirical";
  j["D"] = r.D ? Json(*r.D) : Json(nullptr);
  j["delta_l1"] = r.delta_l1;
  j["delta_l2sq"] = r.delta_l2sq;
  j["mean"] = r.mean;
  j["n"] = r.n;
  if (!r.exact) j["ess"] = r.ess;
  Json pts = Json::array();
  for (const auto& p : r.points)
    pts.push_back({{"lambda", p.lambda},
                   {"lhs", p.lhs},
                   {"std_error", p.std_error},
                   {"rhs", p.rhs},
                   {"verdict", std::string(to_string(p.verdict))}});
  j["points"] = pts;
  j["verdict"] = std::string(to_string(r.verdict));
  return j;
}

Json to_json(const BlowupReport& r) {
  return Json{{"volume", r.volume},       {"set_size", r.set_size},
              {"epsilon", r.epsilon},     {"D", r.D},
              {"mass_C", r.mass_C},       {"mass_blowup", r.mass_blowup},
              {"std_error", r.std_error}, {"bound", r.bound},
              {"applicable", r.applicable}, {"mode", r.exact ? "exact" : "sampled"},
              {"ok", r.ok}};
}

Json to_json(const DeviationScan& s) {
  Json j;
  j["event"] = std::string(to_string(s.event));
  j["epsilon"] = s.epsilon;
  if (s.event == DeviationEvent::BlockMeanAtMost) j["threshold"] = s.threshold;
  j["D"] = s.D ? Json(*s.D) : Json(nullptr);
  j["delta_l1"] = s.delta_l1;
  j["floor"] = s.floor ? Json(*s.floor) : Json(nullptr);
  Json pts = Json::array();
  for (const auto& p : s.points) {
    Json q{{"side", p.side},         {"volume", p.volume}, {"mode", p.exact ? "exact" : "sampled"},
           {"mean", p.mean},         {"p", p.p},           {"std_error", p.std_error},
           {"p_interval", p.p_interval}, {"rate", number_or_inf(p.rate)}};
    if (p.upper_bound) q["upper_bound"] = *p.upper_bound;
    if (!p.exact) q["ess"] = p.ess;
    q["inclusion_ok"] = p.inclusion_ok;
    q["above_floor"] = p.above_floor;
    pts.push_back(q);
  }
  j["points"] = pts;
  j["decreasing"] = s.decreasing;
  j["ok"] = s.ok;
  return j;
}

Json to_json(const EntropyReport& r) {
  Json j;
  j["sides"] = r.sides;
  j["volumes"] = r.volumes;
  j["H"] = r.H;
  j["per_site"] = r.per_site;
  j["trend"] = {{"decreasing", r.decreasing}, {"nonincreasing", r.nonincreasing}, {"slope", r.slope},
                {"spread", r.spread}};
  return j;
}

Json to_json(const ShieldsCheck& c) {
  return Json{{"tv", c.tv},
              {"bound", c.bound},
              {"hamming", c.hamming},
              {"n_breve", c.n_breve},
              {"epsilon", c.epsilon},
              {"rho", c.rho},
              {"lemma_applies", c.lemma_applies},
              {"lemma_ok", c.lemma_ok},
              {"ok", c.ok}};
}

std::string entropy_csv(const EntropyReport& r) {
  std::ostringstream os;
  os << "n,volume,H_n,per_site\n";
  for (std::size_t i = 0; i < r.sides.size(); ++i)
    os << r.sides[i] << ',' << r.volumes[i] << ',' << format_double(r.H[i]) << ',' << format_double(r.per_site[i]) << '\n';
  return os.str();
}

std::string frequency_csv(int n, int k, const PatternDistribution& freq) {
  std::ostringstream os;
  os << "n,k,pattern_code,freq\n";
  freq.for_each([&](std::span<const Symbol> pat, double v) {
    os << n << ',' << k << ',' << encode_symbols(pat, freq.alphabet()) << ',' << format_double(v) << '\n';
  });
  return os.str();
}

std::string dobrushin_csv(const DobrushinReport& r) {
  std::ostringstream os;
  os << "y,value\n";
  for (const auto& e : r.row) {
    std::string y;
    for (std::size_t i = 0; i < e.y.coords.size(); ++i) y += (i ? " " : "") + std::to_string(e.y.coords[i]);
    os << y << ',' << format_double(e.value) << '\n';
  }
  return os.str();
}

std::string gcb_csv(const GcbTestReport& r) {
  std::ostringstream os;
  os << "lambda,lhs,std_error,rhs,verdict\n";
  for (const auto& p : r.points)
    os << format_double(p.lambda) << ',' << format_double(p.lhs) << ',' << format_double(p.std_error) << ','
       << format_double(p.rhs) << ',' << to_string(p.verdict) << '\n';
  return os.str();
}

std::string deviation_csv(const DeviationScan& s) {
  std::ostringstream os;
  os << "side,volume,exact,mean,p,std_error,p_interval,rate\n";
  for (const auto& p : s.points)
    os << p.side << ',' << p.volume << ',' << (p.exact ? 1 : 0) << ',' << format_double(p.mean) << ','
       << format_double(p.p) << ',' << format_double(p.std_error) << ',' << format_double(p.p_interval) << ','
       << csv_number(p.rate) << '\n';
  return os.str();
}

Json to_json(const ChainConfig& cfg) {
  Json j;
  j["d"] = cfg.window.dim();
  j["side"] = cfg.window.side();
  j["geometry"] = std::string(to_string(cfg.window.geometry()));
  j["alphabet"] = cfg.window.alphabet();
  j["boundary"] = boundary_line(cfg.boundary);
  j["potential"] = cfg.potential.name();
  j["model"] = cfg.potential.params() ? to_json(*cfg.potential.params()) : Json(nullptr);
  j["kernel"] = std::string(to_string(cfg.kernel));
  j["order"] = cfg.order == SweepOrder::Lexicographic ? "lexicographic" : "random";
  j["burnin"] = cfg.burnin;
  j["between"] = cfg.between;
  j["samples"] = cfg.samples;
  j["chains"] = cfg.chains;
  j["seed"] = cfg.seed;
  return j;
}

std::string write_sample_set(const SampleSet& set) {
  std::ostringstream os;
  os << to_json(set.config).dump() << '\n';
  for (const auto& omega : set.samples) {
    std::string t = to_text(omega);
    while (!t.empty() && t.back() == '\n') t.pop_back();
    std::string line;
    for (char c : t) line += c == '\n' ? std::string(" ; ") : std::string(1, c);
    os << line << '\n';
  }
  return os.str();
}

SampleFile read_sample_set(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("sample file: missing header");
  SampleFile f;
  f.header = Json::parse(line);
  const auto per_chain = f.header.at("samples").get<std::uint64_t>();
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::string t;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line.compare(i, 3, " ; ") == 0) {
        t += '\n';
        i += 2;
      } else {
        t += line[i];
      }
    }
    f.chain_of.push_back(static_cast<std::uint32_t>(f.samples.size() / per_chain));
    f.samples.push_back(configuration_from_text(t));
  }
  return f;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace gibbslab
