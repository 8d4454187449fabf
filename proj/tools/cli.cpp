#include "cli.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "openset/data.hpp"
#include "openset/errors.hpp"
#include "openset/evidence.hpp"
#include "openset/inference.hpp"
#include "openset/model_io.hpp"
#include "openset/oracle.hpp"
#include "openset/predictive.hpp"
#include "openset/synth.hpp"
#include "openset/verify.hpp"

namespace openset::cli {

namespace {

struct RunConfig {
  std::string data;
  std::string model;
  std::string out;
  std::string sidecar;
  std::string label_col = "label";
  double r = 1.0;
  double a = 0.0;
  std::string b = "zero";
  double eps = 1e-3;
  std::string prior = "uniform";
  std::vector<std::string> declared;
  double r_min = 1e-4;
  double r_max = 1e4;
  double tol = 1e-6;
  std::size_t grid = 0;
  std::uint64_t seed = 1;
  std::size_t samples = 100000;
  std::size_t dim = 2;
  std::size_t classes = 2;
  std::size_t per_class = 10;
  std::vector<std::size_t> counts;
  double r_true = 1.0;
  double within_sd = 1.0;
};

std::string fmt(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// Writes to the named file, or to the fallback stream when path is empty.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
    } else {
      file_.open(path);
      if (!file_) throw InputError(path + ": cannot open for writing");
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

PriorHyper make_prior(const RunConfig& cfg, std::size_t dim) {
  if (cfg.b == "zero") return PriorHyper(cfg.r, cfg.a, std::nullopt);
  if (cfg.b == "eps-identity") {
    return PriorHyper(cfg.r, cfg.a, SymMatrix::scaled_identity(dim, cfg.eps));
  }
  throw InputError("--b must be 'zero' or 'eps-identity', got '" + cfg.b + "'");
}

LabeledDataset load_training(const RunConfig& cfg) {
  LabeledDataset ds = load_csv(cfg.data, cfg.label_col);
  for (const std::string& name : cfg.declared) ds.declare_class(name);
  ds.validate();
  return ds;
}

ClassPrior parse_class_prior(const std::string& spec, std::size_t k) {
  if (spec == "uniform") return ClassPrior::uniform(k);
  std::vector<double> probs;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      probs.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw InputError("--prior: cannot parse '" + item + "'");
    }
  }
  if (probs.size() != k) {
    throw InputError("--prior has " + std::to_string(probs.size()) +
                     " entries, model has " + std::to_string(k) + " classes");
  }
  return ClassPrior(std::move(probs));
}

void write_curve(std::ostream& os, const EvidenceCurve& curve) {
  os << "r,log_evidence\n";
  for (std::size_t i = 0; i < curve.r_values.size(); ++i) {
    os << fmt(curve.r_values[i]) << ',';
    if (curve.log_evidence[i]) os << fmt(*curve.log_evidence[i]);
    os << '\n';
  }
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  const LabeledDataset ds = load_training(cfg);
  const PriorHyper prior = make_prior(cfg, ds.dim);
  const PosteriorMNW post = posterior(accumulate(ds), prior);
  const PredictiveModel model(to_params(post, ds.class_names));
  save_model(cfg.model, model.params());
  out << "N = " << ds.dim << "\nK = " << ds.num_classes() << "\nT = " << ds.size()
      << "\na* = " << fmt(post.a_star, 10) << "\nlogdet B* = "
      << fmt(model.logdet_b_star(), 10) << "\nmodel written to " << cfg.model << '\n';
  return kOk;
}

int cmd_classify(const RunConfig& cfg, std::ostream& out) {
  const PredictiveModel model(load_model(cfg.model));
  const std::vector<Vector> rows = load_features_csv(cfg.data, cfg.label_col);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<std::size_t>(rows[i].size()) != model.dim()) {
      throw DimensionMismatch(cfg.data + ": patterns have " + std::to_string(rows[i].size()) +
                              " features, model expects " + std::to_string(model.dim()));
    }
  }
  const ClassPrior prior = parse_class_prior(cfg.prior, model.num_classes());
  const auto scored =
      score_batch(model, rows, prior, CostMatrix::zero_one(model.num_classes()));

  Output sink(cfg.out, out);
  std::ostream& os = sink.stream();
  const auto& names = model.class_names();
  for (const auto& n : names) os << "score_" << n << ',';
  for (const auto& n : names) os << "post_" << n << ',';
  os << "decision\n";
  for (const ScoredRow& row : scored) {
    for (double s : row.log_scores) os << fmt(s) << ',';
    for (double p : row.posterior) os << fmt(p) << ',';
    os << names[row.action] << '\n';
  }
  return kOk;
}

int cmd_tune_r(const RunConfig& cfg, std::ostream& out) {
  const LabeledDataset ds = load_training(cfg);
  const SufficientStats stats = accumulate(ds);
  const TuneResult result = tune_r(stats, cfg.r_min, cfg.r_max, cfg.tol);
  out << "r = " << fmt(result.r) << "\nlog_evidence = " << fmt(result.log_evidence)
      << "\nboundary = " << (result.at_boundary ? "yes" : "no") << '\n';
  if (cfg.grid > 0) {
    const EvidenceCurve curve =
        evidence_curve(stats, log_spaced_grid(cfg.r_min, cfg.r_max, cfg.grid));
    Output sink(cfg.out, out);
    write_curve(sink.stream(), curve);
  }
  return kOk;
}

int cmd_evidence_curve(const RunConfig& cfg, std::ostream& out) {
  const LabeledDataset ds = load_training(cfg);
  const EvidenceCurve curve = evidence_curve(
      accumulate(ds), log_spaced_grid(cfg.r_min, cfg.r_max, cfg.grid == 0 ? 200 : cfg.grid));
  if (!curve.mode) throw DegenerateScatter("evidence-curve: no grid point is non-degenerate");
  Output sink(cfg.out, out);
  write_curve(sink.stream(), curve);
  return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  SeededGenerator gen(cfg.seed);
  std::vector<CheckResult> checks;
  if (!cfg.model.empty()) {
    checks = verify_model(gen, load_model(cfg.model), cfg.samples);
  } else {
    checks = verify_wishart_mean(gen, 5.0,
                                 SymMatrix((Matrix(2, 2) << 2.0, 0.5, 0.5, 1.0).finished()),
                                 cfg.samples);
    for (auto& c : verify_mc_predictive(gen, cfg.samples)) checks.push_back(std::move(c));
    for (auto& c : verify_chain_rule(gen)) checks.push_back(std::move(c));
  }

  bool all_pass = !checks.empty();
  nlohmann::json summary = nlohmann::json::array();
  for (const CheckResult& c : checks) {
    all_pass = all_pass && c.pass;
    out << (c.pass ? "PASS " : "FAIL ") << c.probe;
    if (c.note.empty()) {
      out << "  closed_form=" << fmt(c.closed_form, 10) << " estimate=" << fmt(c.mc_estimate, 10)
          << " std_error=" << fmt(c.std_error, 4) << " tolerance=" << fmt(c.tolerance, 4);
    } else {
      out << "  " << c.note;
    }
    out << '\n';
    summary.push_back({{"probe", c.probe},
                       {"closed_form", c.closed_form},
                       {"mc_estimate", c.mc_estimate},
                       {"std_error", c.std_error},
                       {"pass", c.pass}});
  }
  out << (all_pass ? "all checks passed" : "verification FAILED") << '\n';
  if (!cfg.out.empty()) {
    std::ofstream f(cfg.out);
    if (!f) throw InputError(cfg.out + ": cannot open for writing");
    f << summary.dump(2) << '\n';
  } else {
    out << "summary " << summary.dump() << '\n';
  }
  return all_pass ? kOk : kVerificationFailed;
}

int cmd_gen_synth(const RunConfig& cfg, std::ostream& out) {
  SynthSpec spec;
  spec.dim = cfg.dim;
  spec.counts = cfg.counts.empty() ? std::vector<std::size_t>(cfg.classes, cfg.per_class)
                                   : cfg.counts;
  spec.r_true = cfg.r_true;
  spec.within_sd = cfg.within_sd;
  SeededGenerator gen(cfg.seed);
  const SynthData data = generate_synthetic(gen, spec);
  const LabeledDataset& ds = data.dataset;

  {
    std::ofstream csv(cfg.out);
    if (!csv) throw InputError(cfg.out + ": cannot open for writing");
    for (std::size_t j = 0; j < ds.dim; ++j) csv << 'x' << j + 1 << ',';
    csv << cfg.label_col << '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
      for (Eigen::Index j = 0; j < ds.patterns[i].size(); ++j) {
        csv << fmt(ds.patterns[i](j)) << ',';
      }
      csv << ds.class_names[ds.labels[i]] << '\n';
    }
  }
  const std::string sidecar = cfg.sidecar.empty() ? cfg.out + ".truth.json" : cfg.sidecar;
  std::ofstream truth(sidecar);
  if (!truth) throw InputError(sidecar + ": cannot open for writing");
  truth << truth_to_json(data.truth, ds) << '\n';
  out << "wrote " << ds.size() << " patterns (N = " << ds.dim << ", K = " << ds.num_classes()
      << ") to " << cfg.out << "\nground truth in " << sidecar << '\n';
  return kOk;
}

std::string kind(const Error& e) {
  if (dynamic_cast<const DegenerateScatter*>(&e)) return "DegenerateScatter";
  if (dynamic_cast<const InsufficientDof*>(&e)) return "InsufficientDof";
  if (dynamic_cast<const NotPositiveDefinite*>(&e)) return "NotPositiveDefinite";
  if (dynamic_cast<const NoFiniteValue*>(&e)) return "NoFiniteValue";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const NonFiniteValue*>(&e)) return "NonFiniteValue";
  if (dynamic_cast<const DimensionMismatch*>(&e)) return "DimensionMismatch";
  if (dynamic_cast<const UnknownLabel*>(&e)) return "UnknownLabel";
  return "error";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian Gaussian openset classifier", "openset-cli"};
  app.require_subcommand(1);
  RunConfig cfg;

  const auto add_data = [&](CLI::App* sub) {
    sub->add_option("--data", cfg.data, "Input CSV")->required();
    sub->add_option("--label-col", cfg.label_col, "Name of the label column");
  };
  const auto add_declared = [&](CLI::App* sub) {
    sub->add_option("--declare-class", cfg.declared,
                    "Declare a class with no training data (repeatable)")
        ->allow_extra_args(false);
  };
  const auto add_range = [&](CLI::App* sub) {
    sub->add_option("--r-min", cfg.r_min, "Lower end of the r range");
    sub->add_option("--r-max", cfg.r_max, "Upper end of the r range");
  };

  auto* fit = app.add_subcommand("fit", "Fit the posterior and write a model file");
  add_data(fit);
  add_declared(fit);
  fit->add_option("--model", cfg.model, "Model file to write")->required();
  fit->add_option("--r", cfg.r, "Mean shrinkage precision r > 0");
  fit->add_option("--a", cfg.a, "Wishart degrees of freedom a >= 0");
  fit->add_option("--b", cfg.b, "Wishart scale: zero | eps-identity");
  fit->add_option("--eps", cfg.eps, "Scale of B for --b eps-identity");

  auto* classify = app.add_subcommand("classify", "Score patterns with a model file");
  add_data(classify);
  classify->add_option("--model", cfg.model, "Model file")->required();
  classify->add_option("--out", cfg.out, "Output CSV (default: stdout)");
  classify->add_option("--prior", cfg.prior, "Class prior: uniform | p1,p2,...");

  auto* tune = app.add_subcommand("tune-r", "Maximize the evidence over r");
  add_data(tune);
  add_declared(tune);
  add_range(tune);
  tune->add_option("--tol", cfg.tol, "Bracket width in log r at which to stop");
  tune->add_option("--grid", cfg.grid, "Also write an evidence curve with this many points");
  tune->add_option("--out", cfg.out, "Evidence curve CSV (default: stdout)");

  auto* curve = app.add_subcommand("evidence-curve", "Log evidence on a log-spaced r grid");
  add_data(curve);
  add_declared(curve);
  add_range(curve);
  curve->add_option("--grid", cfg.grid, "Number of grid points (default 200)");
  curve->add_option("--out", cfg.out, "Output CSV (default: stdout)");

  auto* verify = app.add_subcommand("verify", "Run the Monte-Carlo and chain-rule oracles");
  verify->add_option("--seed", cfg.seed, "Random seed");
  verify->add_option("--samples", cfg.samples, "Monte-Carlo samples per probe");
  verify->add_option("--model", cfg.model, "Check this model file instead of synthetic probes");
  verify->add_option("--out", cfg.out, "Write the JSON summary here");

  auto* synth = app.add_subcommand("gen-synth", "Sample a dataset from the generative model");
  synth->add_option("--out", cfg.out, "Output CSV")->required();
  synth->add_option("--sidecar", cfg.sidecar, "Ground-truth JSON (default: <out>.truth.json)");
  synth->add_option("--label-col", cfg.label_col, "Name of the label column");
  synth->add_option("--dim", cfg.dim, "Feature dimension N")->check(CLI::PositiveNumber);
  synth->add_option("--classes", cfg.classes, "Number of classes K")->check(CLI::PositiveNumber);
  synth->add_option("--per-class", cfg.per_class, "Patterns per class");
  synth->add_option("--counts", cfg.counts, "Explicit per-class counts (overrides K)")
      ->delimiter(',');
  synth->add_option("--r-true", cfg.r_true, "Generating r");
  synth->add_option("--within-sd", cfg.within_sd, "Within-class standard deviation");
  synth->add_option("--seed", cfg.seed, "Random seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (fit->parsed()) return cmd_fit(cfg, out);
    if (classify->parsed()) return cmd_classify(cfg, out);
    if (tune->parsed()) return cmd_tune_r(cfg, out);
    if (curve->parsed()) return cmd_evidence_curve(cfg, out);
    if (verify->parsed()) return cmd_verify(cfg, out);
    if (synth->parsed()) return cmd_gen_synth(cfg, out);
  } catch (const NumericalError& e) {
    err << kind(e) << ": " << e.what() << '\n';
    return kDegenerate;
  } catch (const Error& e) {
    err << kind(e) << ": " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace openset::cli
