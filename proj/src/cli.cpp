#include "ambitalk/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "ambitalk/channels.hpp"
#include "ambitalk/verify.hpp"

namespace ambitalk::cli {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

std::string opt(const std::optional<double> &x) { return x ? num(*x) : std::string(); }

std::string flag(bool b) { return b ? "true" : "false"; }

// Fixed significant digits in JSON output as well.
ordered_json jnum(double x) { return std::stod(num(x)); }

ordered_json jopt(const std::optional<double> &x) { return x ? jnum(*x) : ordered_json(nullptr); }

std::string child(const std::string &ptr, const std::string &key) {
  return ptr + "/" + key;
}

void allow_keys(const json &j, const std::string &ptr, std::initializer_list<const char *> keys) {
  if (!j.is_object()) throw ConfigError(ptr, "expected an object");
  for (const auto &[k, v] : j.items()) {
    (void)v;
    if (std::none_of(keys.begin(), keys.end(), [&](const char *a) { return k == a; }))
      throw ConfigError(child(ptr, k), "unknown key '" + k + "'");
  }
}

const json &require(const json &j, const std::string &ptr, const char *key) {
  if (!j.contains(key)) throw ConfigError(child(ptr, key), "missing required key");
  return j.at(key);
}

double number(const json &j, const std::string &ptr) {
  if (!j.is_number()) throw ConfigError(ptr, "expected a number");
  return j.get<double>();
}

long long integer(const json &j, const std::string &ptr) {
  if (!j.is_number_integer()) throw ConfigError(ptr, "expected an integer");
  return j.get<long long>();
}

std::vector<double> numbers(const json &j, const std::string &ptr) {
  if (!j.is_array()) throw ConfigError(ptr, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], child(ptr, std::to_string(i))));
  return out;
}

template <class F>
auto wrap(const std::string &ptr, F &&f) {
  try {
    return f();
  } catch (const InvalidSpec &e) {
    throw ConfigError(ptr, e.what());
  }
}

std::string cells_text(const CommunicationDevice &device, std::size_t w) {
  std::string s;
  for (const Interval &iv : device.cell(w)) {
    if (!s.empty()) s += ';';
    s += num(iv.lo) + ":" + num(iv.hi);
  }
  return s;
}

std::string cut_text(const std::vector<double> &cuts) {
  std::string s;
  for (double c : cuts) {
    if (!s.empty()) s += ';';
    s += num(c);
  }
  return s;
}

std::optional<double> as_if(const EquilibriumReport &r) {
  for (const auto &row : r.per_word)
    if (row.as_if_p) return row.as_if_p;
  return std::nullopt;
}

void write_matrix(std::ostream &out, const channels::WordSpace &space, const Eigen::MatrixXd &m) {
  const std::size_t n = space.size();
  std::size_t width = 6;
  for (std::size_t i = 0; i < n; ++i) width = std::max(width, space.label(i).size() + 2);
  out << std::setw(static_cast<int>(width)) << "";
  for (std::size_t j = 0; j < n; ++j) out << std::setw(16) << space.label(j);
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out << std::setw(static_cast<int>(width)) << std::left << space.label(i) << std::right;
    for (std::size_t j = 0; j < n; ++j)
      out << std::setw(16) << num(m(static_cast<Index>(i), static_cast<Index>(j)));
    out << '\n';
  }
}

std::string vec_text(const Eigen::VectorXd &v) {
  std::string s;
  for (Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v(i));
  return s;
}

void print_result(std::ostream &out, const channels::RepresentabilityResult &r) {
  out << "representable: " << (r.representable ? "yes" : "no") << '\n';
  if (r.representable) out << "unique: " << (r.unique ? "yes" : "no") << '\n';
  if (r.witness) {
    out << "witness p: " << vec_text(r.witness->p) << '\n';
    out << "witness G: " << vec_text(r.witness->g) << '\n';
  }
  if (r.family)
    out << "family: G(a) in [" << num(r.family->g_a_min) << ", " << num(r.family->g_a_max)
        << "], G(b) = 1 - G(a), p_a = " << num(r.family->q) << "/G(b), p_b = "
        << num(r.family->q) << "/G(a)\n";
  if (r.counterexample) {
    const auto &c = *r.counterexample;
    auto word = [](const channels::Word &w) {
      std::string s;
      for (int x : w) s += std::to_string(x);
      return s;
    };
    out << "counterexample: v=" << word(c.v) << " w=" << word(c.w) << " w'=" << word(c.w_prime)
        << " shannon(v,w)=" << num(c.shannon_w) << " shannon(v,w')=" << num(c.shannon_w_prime)
        << '\n';
  }
}

} // namespace

Format parse_format(const std::string &name) {
  if (name == "csv") return Format::Csv;
  if (name == "jsonl" || name == "json-lines") return Format::Jsonl;
  throw ConfigError("/output/format", "unknown format '" + name + "'");
}

RunConfig parse_config(const std::string &text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ConfigError("", e.what());
  }
  allow_keys(root, "", {"state", "prior", "words", "ambiguity", "solver", "output"});

  const json &js = require(root, "", "state");
  allow_keys(js, "/state", {"lo", "hi"});
  const StateInterval state = wrap("/state", [&] {
    return StateInterval(number(require(js, "/state", "lo"), "/state/lo"),
                         number(require(js, "/state", "hi"), "/state/hi"));
  });

  std::optional<PriorDensity> prior;
  if (!root.contains("prior") || root["prior"] == "uniform") {
    prior = PriorDensity::uniform(state);
  } else {
    const json &jp = root["prior"];
    if (jp.is_string()) throw ConfigError("/prior", "expected \"uniform\" or a piecewise object");
    allow_keys(jp, "/prior", {"piecewise"});
    const json &pw = require(jp, "/prior", "piecewise");
    allow_keys(pw, "/prior/piecewise", {"breakpoints", "values"});
    auto bp = numbers(require(pw, "/prior/piecewise", "breakpoints"), "/prior/piecewise/breakpoints");
    auto vals = numbers(require(pw, "/prior/piecewise", "values"), "/prior/piecewise/values");
    prior = wrap("/prior/piecewise", [&] { return PriorDensity(std::move(bp), std::move(vals)); });
  }

  const json &jw = require(root, "", "words");
  allow_keys(jw, "/words", {"count", "names"});
  if (jw.contains("count") == jw.contains("names"))
    throw ConfigError("/words", "give exactly one of 'count' or 'names'");
  std::optional<WordSet> words;
  if (jw.contains("count")) {
    const long long n = integer(jw["count"], "/words/count");
    if (n < 2) throw ConfigError("/words/count", "at least two words are required");
    words = WordSet::numbered(static_cast<std::size_t>(n));
  } else {
    const json &names = jw["names"];
    if (!names.is_array()) throw ConfigError("/words/names", "expected an array of strings");
    std::vector<std::string> list;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (!names[i].is_string()) throw ConfigError("/words/names/" + std::to_string(i), "expected a string");
      list.push_back(names[i].get<std::string>());
    }
    words = wrap("/words/names", [&] { return WordSet(std::move(list)); });
  }

  const json &ja = require(root, "", "ambiguity");
  allow_keys(ja, "/ambiguity", {"p_lo", "p_hi", "g_set"});
  const double p_lo = number(require(ja, "/ambiguity", "p_lo"), "/ambiguity/p_lo");
  const double p_hi = number(require(ja, "/ambiguity", "p_hi"), "/ambiguity/p_hi");
  AmbiguitySet::GSet gset = FullSimplex{};
  if (ja.contains("g_set") && ja["g_set"] != "full_simplex") {
    const json &jg = ja["g_set"];
    if (jg.is_string()) throw ConfigError("/ambiguity/g_set", "expected \"full_simplex\" or {\"finite\": rows}");
    allow_keys(jg, "/ambiguity/g_set", {"finite"});
    const json &rows = require(jg, "/ambiguity/g_set", "finite");
    if (!rows.is_array() || rows.empty())
      throw ConfigError("/ambiguity/g_set/finite", "expected a non-empty array of rows");
    FiniteSet fs;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string ptr = "/ambiguity/g_set/finite/" + std::to_string(i);
      const auto row = numbers(rows[i], ptr);
      if (row.size() != words->size()) throw ConfigError(ptr, "row length differs from the word count");
      fs.members.push_back(Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Index>(row.size())));
    }
    gset = std::move(fs);
  }
  AmbiguitySet ambiguity = wrap("/ambiguity", [&] { return AmbiguitySet(p_lo, p_hi, std::move(gset)); });

  RunConfig cfg{
      .spec = wrap("", [&] { return GameSpec(state, *prior, *words, ambiguity); }),
      .search = {},
      .out_path = std::nullopt,
      .format = Format::Csv,
  };

  if (root.contains("solver")) {
    const json &jsv = root["solver"];
    allow_keys(jsv, "/solver", {"restarts", "seed", "tolerance", "max_iter"});
    if (jsv.contains("restarts")) {
      const long long r = integer(jsv["restarts"], "/solver/restarts");
      if (r < 1) throw ConfigError("/solver/restarts", "must be at least 1");
      cfg.search.restarts = static_cast<int>(r);
    }
    if (jsv.contains("seed")) {
      const long long s = integer(jsv["seed"], "/solver/seed");
      if (s < 0) throw ConfigError("/solver/seed", "must be non-negative");
      cfg.search.seed = static_cast<std::uint64_t>(s);
    }
    if (jsv.contains("tolerance")) {
      const double t = number(jsv["tolerance"], "/solver/tolerance");
      if (!(t > 0.0)) throw ConfigError("/solver/tolerance", "must be positive");
      cfg.search.dynamics.tol = t;
    }
    if (jsv.contains("max_iter")) {
      const long long m = integer(jsv["max_iter"], "/solver/max_iter");
      if (m < 1) throw ConfigError("/solver/max_iter", "must be at least 1");
      cfg.search.dynamics.max_iter = static_cast<int>(m);
    }
  }

  if (root.contains("output")) {
    const json &jo = root["output"];
    allow_keys(jo, "/output", {"path", "format"});
    if (jo.contains("path")) {
      if (!jo["path"].is_string()) throw ConfigError("/output/path", "expected a string");
      cfg.out_path = jo["path"].get<std::string>();
    }
    if (jo.contains("format")) {
      if (!jo["format"].is_string()) throw ConfigError("/output/format", "expected a string");
      cfg.format = parse_format(jo["format"].get<std::string>());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

RunConfig symmetric_config(double p) {
  const StateInterval state(-0.5, 0.5);
  return RunConfig{
      .spec = GameSpec(state, PriorDensity::uniform(state), WordSet({"L", "R"}),
                       AmbiguitySet(p, p, FullSimplex{})),
      .search = {},
      .out_path = std::nullopt,
      .format = Format::Csv,
  };
}

int cmd_solve(const RunConfig &config, std::ostream &out) {
  const EquilibriumReport r = efficient_equilibrium(config.spec, config.search);
  const auto cuts = r.device.cutpoints();
  const auto &words = config.spec.words;
  if (config.format == Format::Csv) {
    out << "word,name,cell,mass,centroid,lambda_exante,lambda_interim,action_exante,"
           "action_interim,distance_exante,distance_interim,ratio,regular,regular_sufficient,"
           "kappa_hi,as_if_p,cutpoints,exante_loss,babbling_loss,interim_is_equilibrium,"
           "iterations\n";
    for (const auto &row : r.per_word) {
      out << row.word << ',' << words.name(row.word) << ',' << cells_text(r.device, row.word) << ','
          << num(row.mass) << ',' << opt(row.centroid) << ',' << opt(row.lambda_exante) << ','
          << opt(row.lambda_interim) << ',' << num(row.action_exante) << ','
          << num(row.action_interim) << ',' << num(row.distance_exante) << ','
          << num(row.distance_interim) << ',' << opt(row.ratio) << ',' << flag(row.regular) << ','
          << (row.regular_sufficient ? flag(*row.regular_sufficient) : "") << ','
          << num(row.kappa_hi) << ',' << opt(row.as_if_p) << ',' << cut_text(cuts) << ','
          << num(r.exante_loss) << ',' << num(r.babbling_loss) << ','
          << flag(r.interim_is_equilibrium) << ',' << r.iterations << '\n';
    }
    return kOk;
  }
  ordered_json summary;
  summary["type"] = "summary";
  summary["cutpoints"] = ordered_json::array();
  for (double c : cuts) summary["cutpoints"].push_back(jnum(c));
  summary["exante_loss"] = jnum(r.exante_loss);
  summary["babbling_loss"] = jnum(r.babbling_loss);
  summary["interim_is_equilibrium"] = r.interim_is_equilibrium;
  summary["iterations"] = r.iterations;
  summary["restarts"] = r.restarts;
  summary["restart_seed"] = r.restart_seed ? ordered_json(*r.restart_seed) : ordered_json(nullptr);
  out << summary.dump() << '\n';
  for (const auto &row : r.per_word) {
    ordered_json j;
    j["type"] = "word";
    j["word"] = row.word;
    j["name"] = words.name(row.word);
    j["cell"] = ordered_json::array();
    for (const Interval &iv : r.device.cell(row.word)) j["cell"].push_back({jnum(iv.lo), jnum(iv.hi)});
    j["mass"] = jnum(row.mass);
    j["centroid"] = jopt(row.centroid);
    j["lambda_exante"] = jopt(row.lambda_exante);
    j["lambda_interim"] = jopt(row.lambda_interim);
    j["action_exante"] = jnum(row.action_exante);
    j["action_interim"] = jnum(row.action_interim);
    j["distance_exante"] = jnum(row.distance_exante);
    j["distance_interim"] = jnum(row.distance_interim);
    j["ratio"] = jopt(row.ratio);
    j["regular"] = row.regular;
    j["regular_sufficient"] =
        row.regular_sufficient ? ordered_json(*row.regular_sufficient) : ordered_json(nullptr);
    j["kappa_hi"] = jnum(row.kappa_hi);
    j["as_if_p"] = jopt(row.as_if_p);
    out << j.dump() << '\n';
  }
  return kOk;
}

int cmd_sweep(const RunConfig &config, const SweepOptions &options, std::ostream &out) {
  if (options.steps < 1) throw ConfigError("/sweep/steps", "must be at least 1");
  if (options.jobs < 1) throw ConfigError("/sweep/jobs", "must be at least 1");
  if (!(options.from >= 0.0 && options.from <= 1.0 && options.to >= 0.0 && options.to <= 1.0))
    throw ConfigError("/sweep", "p range must lie in [0, 1]");
  if (!(options.width >= 0.0)) throw ConfigError("/sweep/width", "must be non-negative");

  const auto steps = static_cast<std::size_t>(options.steps);
  std::vector<double> ps(steps);
  for (std::size_t k = 0; k < steps; ++k)
    ps[k] = steps == 1 ? options.from
                       : options.from + (options.to - options.from) * static_cast<double>(k) /
                                            static_cast<double>(steps - 1);

  std::vector<std::optional<EquilibriumReport>> results(steps);
  std::vector<std::exception_ptr> errors(steps);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < steps; k = next++) {
      try {
        const double p = ps[k];
        GameSpec spec = config.spec;
        spec.ambiguity = AmbiguitySet(std::max(0.0, p - options.width), p, spec.ambiguity.g_set());
        results[k] = efficient_equilibrium(spec, config.search);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const auto jobs = std::min<std::size_t>(static_cast<std::size_t>(options.jobs), steps);
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  for (const auto &e : errors)
    if (e) std::rethrow_exception(e);

  const auto &names = config.spec.words.names();
  if (config.format == Format::Csv) {
    out << 'p';
    for (const auto &n : names) out << ",exante_" << n;
    for (const auto &n : names) out << ",interim_" << n;
    out << ",exante_loss,babbling_loss,as_if_p\n";
    for (std::size_t k = 0; k < steps; ++k) {
      const EquilibriumReport &r = *results[k];
      out << num(ps[k]);
      for (Index w = 0; w < r.exante_profile.actions.size(); ++w) out << ',' << num(r.exante_profile.actions(w));
      for (Index w = 0; w < r.interim_profile.actions.size(); ++w) out << ',' << num(r.interim_profile.actions(w));
      out << ',' << num(r.exante_loss) << ',' << num(r.babbling_loss) << ',' << opt(as_if(r)) << '\n';
    }
    return kOk;
  }
  for (std::size_t k = 0; k < steps; ++k) {
    const EquilibriumReport &r = *results[k];
    ordered_json j;
    j["p"] = jnum(ps[k]);
    for (std::size_t w = 0; w < names.size(); ++w)
      j["exante_" + names[w]] = jnum(r.exante_profile.actions(static_cast<Index>(w)));
    for (std::size_t w = 0; w < names.size(); ++w)
      j["interim_" + names[w]] = jnum(r.interim_profile.actions(static_cast<Index>(w)));
    j["exante_loss"] = jnum(r.exante_loss);
    j["babbling_loss"] = jnum(r.babbling_loss);
    j["as_if_p"] = jopt(as_if(r));
    out << j.dump() << '\n';
  }
  return kOk;
}

int cmd_channel(const ChannelOptions &options, std::ostream &out) {
  if (options.m < 1) throw ConfigError("/m", "must be at least 1");
  if (options.n < 1) throw ConfigError("/n", "must be at least 1");
  if (!(options.q >= 0.0 && options.q <= 1.0)) throw ConfigError("/q", "must lie in [0, 1]");
  const channels::WordSpace space =
      wrap("/n", [&] { return channels::WordSpace(options.m + 1, options.n); });
  const channels::ShannonChannel ch(space, options.q);
  const Eigen::MatrixXd shannon = channels::transition_matrix(ch);

  out << "Shannon channel m=" << options.m << " n=" << options.n << " q=" << num(options.q) << '\n';
  if (space.size() <= 16) {
    out << "rows: sent word, columns: received word\n";
    write_matrix(out, space, shannon);
  } else {
    out << "(" << space.size() << " words; matrix omitted from the listing)\n";
  }

  std::optional<channels::RepresentabilityResult> result;
  try {
    result = channels::decompose_shannon(ch);
  } catch (const channels::DegenerateQ &e) {
    if (!e.identification()) throw ConfigError("/q", e.what());
    out << "degenerate q: " << e.what() << '\n';
    result = e.identification();
  }
  print_result(out, *result);
  if (result->witness && space.size() <= 16) {
    out << "noisy-talk witness matrix\n";
    write_matrix(out, space, channels::transition_matrix(*result->witness));
  }

  if (options.export_dir) {
    const std::filesystem::path dir(*options.export_dir);
    std::filesystem::create_directories(dir);
    std::ofstream s(dir / "shannon.csv");
    channels::write_matrix_csv(s, space, shannon);
    if (result->witness) {
      std::ofstream t(dir / "noisy_talk.csv");
      channels::write_matrix_csv(t, space, channels::transition_matrix(*result->witness));
    }
  }
  return kOk;
}

int cmd_verify(const std::optional<RunConfig> &config, const VerifyOptions &options,
               std::ostream &out) {
  std::vector<GameInstance> instances;
  if (config) {
    const EquilibriumReport eq = efficient_equilibrium(config->spec, config->search);
    instances.push_back({config->spec, eq.device});
  }
  for (auto &inst : seeded_instances(options.seed, options.instances)) instances.push_back(std::move(inst));

  const std::vector<verify::SuiteResult> results{
      verify::posterior_suite(instances),      verify::oracle_suite(instances),
      verify::underreaction_suite(instances),  verify::regular_word_suite(instances),
      verify::nonbabbling_suite(instances),    verify::segment_suite(instances),
      verify::channel_suite(),
  };

  bool ok = true;
  if (options.format == Format::Csv) out << "suite,passed,cases,failures,worst,note\n";
  for (const auto &r : results) {
    ok = ok && r.passed();
    if (options.format == Format::Csv) {
      std::string note = r.note;
      std::replace(note.begin(), note.end(), ',', ' ');
      out << r.name << ',' << flag(r.passed()) << ',' << r.cases << ',' << r.failures << ','
          << num(r.worst) << ',' << note << '\n';
    } else {
      ordered_json j;
      j["suite"] = r.name;
      j["passed"] = r.passed();
      j["cases"] = r.cases;
      j["failures"] = r.failures;
      j["worst"] = jnum(r.worst);
      j["note"] = r.note;
      out << j.dump() << '\n';
    }
  }
  return ok ? kOk : kSuiteFailure;
}

int guarded(const std::function<int()> &body, std::ostream &err) {
  try {
    return body();
  } catch (const ConfigError &e) {
    err << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidSpec &e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NonConvergence &e) {
    err << e.what() << " (iterations " << e.iterations() << ", residual " << e.residual() << ")\n";
    return kNonConvergence;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kSuiteFailure;
  }
}

} // namespace ambitalk::cli
