#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "gibbslab/concentration.hpp"
#include "gibbslab/dobrushin.hpp"
#include "gibbslab/entropy.hpp"
#include "gibbslab/pattern_distribution.hpp"
#include "gibbslab/potential.hpp"
#include "gibbslab/sampler.hpp"
#include "gibbslab/specification.hpp"

namespace gibbslab {

using Json = nlohmann::ordered_json;

/// Model descriptor {model, beta, h, J, N, alpha, R, d}; unknown keys and out-of-domain values
/// are rejected with std::invalid_argument.
ModelParams parse_model(const Json& j);
ModelParams parse_model_text(std::string_view text);
Json to_json(const ModelParams& p);

/// %.17g
std::string format_double(double v);

/// Two-column (code, probability) table with a '#' header echoing model, window, boundary and
/// log Z. Reading it back reproduces every probability bit for bit.
std::string export_measure(const FiniteGibbsMeasure& mu);
FiniteGibbsMeasure import_measure(std::string_view text);

/// (code, probability) rows over the nonzero entries.
std::string pattern_table(const PatternDistribution& p);

Json to_json(const DobrushinReport& r);
Json to_json(const GcbTestReport& r);
Json to_json(const BlowupReport& r);
Json to_json(const DeviationScan& s);
Json to_json(const EntropyReport& r);
Json to_json(const ShieldsCheck& c);
Json to_json(const Site& s);

/// CSV n,volume,H_n,per_site (n is the window side).
std::string entropy_csv(const EntropyReport& r);
/// CSV n,k,pattern_code,freq over the nonzero frequencies.
std::string frequency_csv(int n, int k, const PatternDistribution& freq);
/// CSV y,value
std::string dobrushin_csv(const DobrushinReport& r);
/// CSV lambda,lhs,std_error,rhs,verdict
std::string gcb_csv(const GcbTestReport& r);
/// CSV side,volume,exact,mean,p,std_error,p_interval,rate
std::string deviation_csv(const DeviationScan& s);

/// JSON header line followed by one configuration per line ("\n" inside a configuration becomes " ; ").
std::string write_sample_set(const SampleSet& set);
struct SampleFile {
  Json header;
  std::vector<Configuration> samples;
  std::vector<std::uint32_t> chain_of;
};
SampleFile read_sample_set(std::string_view text);
Json to_json(const ChainConfig& cfg);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace gibbslab
