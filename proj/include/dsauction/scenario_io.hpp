#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>

#include "dsauction/engine.hpp"
#include "dsauction/errors.hpp"
#include "dsauction/equilibrium.hpp"
#include "dsauction/model.hpp"
#include "dsauction/sweep.hpp"

namespace dsauction {

/// Random scenario parameters. Every x and y is drawn from
/// Uniform[center - halfwidth, center + halfwidth], every g from
/// Uniform[g_min, g_max]. The stream is std::mt19937_64 seeded with `seed`;
/// a draw maps the top 53 bits of one output to [0, 1). Draw order: buyers
/// (x, y) then sellers (x, y, g).
struct GenerationConfig {
  std::size_t n_buyers = 2;
  std::size_t n_sellers = 3;
  double center = 1.0;
  double halfwidth = 0.5;
  double g_min = 0.5;
  double g_max = 2.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Redraws (continuing the same stream) until the scenario validates.
/// Throws GenerationError after 100 rejected draws.
Scenario generate_scenario(const GenerationConfig& cfg);

/// The five (buyers, sellers) size templates used by the study commands.
inline constexpr std::array<std::pair<std::size_t, std::size_t>, 5> kScenarioTemplates{
    {{2, 3}, {2, 6}, {2, 10}, {3, 2}, {4, 4}}};

/// Template `index % 5` with the given seed and default distributions.
GenerationConfig template_config(std::size_t index, std::uint64_t seed);

/// Shortest decimal that reads back to the same double.
std::string format_number(double v);

Scenario parse_scenario(const std::string& text, bool validate = true);
std::string format_scenario(const Scenario& s);

/// Throws IoError on I/O failure, ParseError on
/// malformed content and ValidationError on invalid parameters.
Scenario load_scenario(const std::filesystem::path& path, bool validate = true);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

std::string trace_csv(const AuctionOutcome& outcome);
std::string sweep_csv(const SweepResult& r);
void emit_trace(const AuctionOutcome& outcome, const std::filesystem::path& path);
void emit_sweep(const SweepResult& r, const std::filesystem::path& path);

std::string equilibrium_json(const Equilibrium& eq);

}  // namespace dsauction
