#include "dsauction/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "dsauction/errors.hpp"

namespace dsauction {

using nlohmann::json;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

double read_number(const json& obj, const std::string& where, const char* key,
                   const char* meaning = nullptr) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    std::string msg = where + ": missing field '" + key + "'";
    if (meaning) msg += std::string(" (") + meaning + ")";
    throw ParseError(msg);
  }
  if (!it->is_number()) throw ParseError(where + "." + key + ": expected a number");
  return it->get<double>();
}

double read_optional(const json& obj, const std::string& where, const char* key) {
  return obj.contains(key) ? read_number(obj, where, key) : 0.0;
}

const json& read_array(const json& root, const char* key) {
  auto it = root.find(key);
  if (it == root.end()) throw ParseError(std::string("missing field '") + key + "'");
  if (!it->is_array()) throw ParseError(std::string(key) + ": expected an array");
  return *it;
}

std::string position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void GenerationConfig::validate() const {
  if (n_buyers < 1 || n_sellers < 1) throw DomainError("need at least one buyer and one seller");
  if (!(halfwidth >= 0.0) || !(center - halfwidth > 0.0))
    throw DomainError("parameter range must stay positive: center - halfwidth > 0");
  if (!(g_min > 0.0 && g_min <= g_max)) throw DomainError("need 0 < g_min <= g_max");
}

Scenario generate_scenario(const GenerationConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const double lo = cfg.center - cfg.halfwidth, hi = cfg.center + cfg.halfwidth;
  for (int attempt = 0; attempt < 100; ++attempt) {
    Scenario s;
    for (std::size_t i = 0; i < cfg.n_buyers; ++i) {
      BuyerSpec b;
      b.utility.x = uniform(rng, lo, hi);
      b.utility.y = uniform(rng, lo, hi);
      s.buyers.push_back(b);
    }
    for (std::size_t j = 0; j < cfg.n_sellers; ++j) {
      SellerSpec sel;
      sel.utility.x = uniform(rng, lo, hi);
      sel.utility.y = uniform(rng, lo, hi);
      sel.generation = uniform(rng, cfg.g_min, cfg.g_max);
      s.sellers.push_back(sel);
    }
    if (validate_scenario(s).valid()) return s;
  }
  throw GenerationError("no valid scenario after 100 draws");
}

GenerationConfig template_config(std::size_t index, std::uint64_t seed) {
  GenerationConfig cfg;
  cfg.n_buyers = kScenarioTemplates[index % kScenarioTemplates.size()].first;
  cfg.n_sellers = kScenarioTemplates[index % kScenarioTemplates.size()].second;
  cfg.seed = seed;
  return cfg;
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

Scenario parse_scenario(const std::string& text, bool validate) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON at " + position(text, e.byte ? e.byte - 1 : 0) + ": " +
                     e.what());
  }
  if (!root.is_object()) throw ParseError("top level must be an object");

  Scenario s;
  const auto& buyers = read_array(root, "buyers");
  for (std::size_t i = 0; i < buyers.size(); ++i) {
    const std::string where = "buyers[" + std::to_string(i) + "]";
    if (!buyers[i].is_object()) throw ParseError(where + ": expected an object");
    BuyerSpec b;
    b.utility.x = read_number(buyers[i], where, "x");
    b.utility.y = read_number(buyers[i], where, "y");
    s.buyers.push_back(b);
  }
  const auto& sellers = read_array(root, "sellers");
  for (std::size_t j = 0; j < sellers.size(); ++j) {
    const std::string where = "sellers[" + std::to_string(j) + "]";
    if (!sellers[j].is_object()) throw ParseError(where + ": expected an object");
    SellerSpec sel;
    sel.utility.x = read_number(sellers[j], where, "x");
    sel.utility.y = read_number(sellers[j], where, "y");
    sel.generation = read_number(sellers[j], where, "g", "generation");
    s.sellers.push_back(sel);
  }
  if (auto it = root.find("aggregator"); it != root.end()) {
    if (!it->is_object()) throw ParseError("aggregator: expected an object");
    s.aggregator.virtual_availability = read_optional(*it, "aggregator", "a0");
    s.aggregator.surcharge = read_optional(*it, "aggregator", "ps");
  }
  if (validate) require_valid(s);
  return s;
}

std::string format_scenario(const Scenario& s) {
  json root;
  root["buyers"] = json::array();
  for (const auto& b : s.buyers) root["buyers"].push_back({{"x", b.utility.x}, {"y", b.utility.y}});
  root["sellers"] = json::array();
  for (const auto& sel : s.sellers)
    root["sellers"].push_back(
        {{"x", sel.utility.x}, {"y", sel.utility.y}, {"g", sel.generation}});
  root["aggregator"] = {{"a0", s.aggregator.virtual_availability},
                        {"ps", s.aggregator.surcharge}};
  return root.dump(2) + "\n";
}

Scenario load_scenario(const std::filesystem::path& path, bool validate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), validate);
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  write_file(path, format_scenario(s));
}

std::string trace_csv(const AuctionOutcome& outcome) {
  std::size_t nb = 0, ns = 0;
  if (!outcome.iterations.empty()) {
    nb = outcome.iterations.front().bids.size();
    ns = outcome.iterations.front().availabilities.size();
  } else {
    nb = outcome.final.demands.size();
    ns = outcome.final.availabilities.size();
  }
  std::ostringstream os;
  os << "k,p";
  for (const char* col : {"b", "d", "beta"})
    for (std::size_t i = 0; i < nb; ++i) os << ',' << col << '_' << i;
  for (const char* col : {"a", "alpha", "rho"})
    for (std::size_t j = 0; j < ns; ++j) os << ',' << col << '_' << j;
  os << '\n';
  for (const auto& r : outcome.iterations) {
    os << r.k << ',' << format_number(r.price);
    for (const auto* v : {&r.bids, &r.demands, &r.betas, &r.availabilities, &r.alphas, &r.rhos})
      for (double x : *v) os << ',' << format_number(x);
    os << '\n';
  }
  return os.str();
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "param,p,volume,U,R,L,converged\n";
  for (const auto& row : r.rows) {
    os << format_number(row.param) << ',' << format_number(row.price) << ','
       << format_number(row.volume) << ',' << format_number(row.welfare) << ','
       << format_number(row.revenue) << ',' << format_number(row.loss) << ','
       << (row.converged ? 1 : 0) << '\n';
  }
  return os.str();
}

void emit_trace(const AuctionOutcome& outcome, const std::filesystem::path& path) {
  write_file(path, trace_csv(outcome));
}

void emit_sweep(const SweepResult& r, const std::filesystem::path& path) {
  write_file(path, sweep_csv(r));
}

std::string equilibrium_json(const Equilibrium& eq) {
  json j;
  j["regime"] = to_string(eq.regime);
  j["price"] = eq.price;
  j["demands"] = eq.demands;
  j["availabilities"] = eq.availabilities;
  j["volume"] = eq.volume;
  j["welfare"] = eq.welfare;
  j["buyers_welfare"] = eq.buyers_welfare;
  j["sellers_welfare"] = eq.sellers_welfare;
  j["revenue"] = eq.revenue;
  j["loss"] = eq.loss;
  j["surcharge"] = eq.surcharge;
  j["virtual_availability"] = eq.virtual_availability;
  j["anticipation_objective"] =
      eq.anticipation_objective ? json(*eq.anticipation_objective) : json(nullptr);
  j["zero_volume"] = eq.zero_volume;
  json k;
  k["applicable"] = eq.kkt.applicable;
  k["mu"] = number_or_null(eq.kkt.mu);
  k["lambda"] = eq.kkt.lambda;
  k["rho"] = eq.kkt.rho;
  k["stationarity_residual"] = eq.kkt.stationarity_residual;
  k["balance_residual"] = eq.kkt.balance_residual;
  k["complementary_slackness"] = eq.kkt.complementary_slackness;
  j["kkt"] = k;
  return j.dump(2) + "\n";
}

}  // namespace dsauction
