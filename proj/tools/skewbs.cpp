#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "skewbs/diagnostics.hpp"
#include "skewbs/errors.hpp"
#include "skewbs/fitting.hpp"
#include "skewbs/io.hpp"

using json = nlohmann::ordered_json;
using namespace skewbs;

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;
constexpr const char* kSchema = "skewbs/1";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  RunConfig run;
  std::string format = "json";
  std::optional<double> lambda_fixed;
  std::string scheme = "case";
  std::optional<int> covariate_index;
  std::vector<std::string> subset;
  std::vector<std::string> drop;
  bool full_matrix = false;

  // simulate
  int n = 100;
  std::vector<double> beta;
  double alpha = 1.0;
  double lambda = 0.0;
  std::string output;
};

int quad_order_from_env() {
  const char* env = std::getenv("SKEWBS_QUAD_ORDER");
  if (!env || !*env) return kDefaultQuadOrder;
  std::istringstream in(env);
  int order = 0;
  if (!(in >> order) || !in.eof()) throw UsageError(std::string("SKEWBS_QUAD_ORDER is not an integer: ") + env);
  return order;
}

// Owns a non-default quadrature rule for the lifetime of a command.
struct Quadrature {
  std::unique_ptr<QuadratureRule> rule;
  explicit Quadrature(int order) {
    if (order != kDefaultQuadOrder) rule = std::make_unique<QuadratureRule>(QuadratureRule::normal_composite(order));
  }
  LikelihoodOptions likelihood() const {
    LikelihoodOptions o;
    o.rule = rule.get();
    return o;
  }
};

bool use_csv(const Options& o) { return o.format == "csv"; }

std::string param_name(Eigen::Index j, Eigen::Index p) {
  if (j < p) return "beta" + std::to_string(j + 1);
  return j == p ? "alpha" : "lambda";
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

std::string cell(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

FitOptions fit_options(const Options& o) {
  FitOptions f;
  f.quad_order = o.run.quadrature_order;
  f.lambda_fixed = o.lambda_fixed;
  return f;
}

void warn(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

json model_json(const std::string& name, const FitResult& f) {
  const Eigen::Index p = f.theta_hat.beta.size();
  json m;
  m["model"] = name;
  m["converged"] = f.converged;
  m["iterations"] = f.iterations;
  m["n_params"] = f.n_params;
  m["beta"] = vec(f.theta_hat.beta);
  m["alpha"] = num(f.theta_hat.alpha);
  m["lambda"] = num(f.theta_hat.lambda);
  m["lambda_fixed"] = f.lambda_fixed;
  m["se"] = {{"beta", vec(f.se.head(p))}, {"alpha", num(f.se(p))}, {"lambda", num(f.se(p + 1))}};
  m["loglik"] = num(f.loglik_hat);
  m["aic"] = num(f.aic);
  m["bic"] = num(f.bic);
  m["hqic"] = num(f.hqic);
  m["grad_norm"] = num(f.grad_norm_at_solution);
  return m;
}

void model_csv(std::ostream& out, const std::string& name, const FitResult& f) {
  const Eigen::VectorXd t = f.theta_hat.to_vector();
  const Eigen::Index p = f.theta_hat.beta.size();
  for (Eigen::Index j = 0; j < t.size(); ++j)
    out << name << ',' << param_name(j, p) << ',' << format_double(t(j)) << ',' << cell(f.se(j)) << '\n';
  out << name << ",loglik," << format_double(f.loglik_hat) << ",\n";
  out << name << ",aic," << format_double(f.aic) << ",\n";
  out << name << ",bic," << format_double(f.bic) << ",\n";
  out << name << ",hqic," << format_double(f.hqic) << ",\n";
}

FitResult fit_checked(const Dataset& d, const FitOptions& fo) {
  FitResult f = fit(d, fo);
  warn(f.warnings);
  return f;
}

int cmd_fit(const Options& o) {
  const Dataset d = ingest(o.run);
  const FitOptions fo = fit_options(o);
  std::vector<std::pair<std::string, FitResult>> models;
  std::optional<LrTestResult> lr;
  if (o.lambda_fixed) {
    models.emplace_back(*o.lambda_fixed == 0.0 ? "log-bs" : "lambda-fixed", fit_checked(d, fo));
  } else {
    models.emplace_back("skewed", fit_checked(d, fo));
    FitOptions ro = fo;
    ro.lambda_fixed = 0.0;
    models.emplace_back("log-bs", fit_checked(d, ro));
    lr = lr_test(models[0].second, models[1].second);
  }

  if (use_csv(o)) {
    std::cout << "model,quantity,estimate,se\n";
    for (const auto& [name, f] : models) model_csv(std::cout, name, f);
    if (lr) {
      std::cout << "lr,statistic," << format_double(lr->statistic) << ",\n";
      std::cout << "lr,reject," << (lr->reject ? 1 : 0) << ",\n";
    }
  } else {
    json out;
    out["schema"] = kSchema;
    out["command"] = "fit";
    out["n"] = d.n();
    out["p"] = d.p();
    out["models"] = json::array();
    for (const auto& [name, f] : models) out["models"].push_back(model_json(name, f));
    if (lr)
      out["lr_test"] = {{"statistic", num(lr->statistic)},
                        {"df", lr->df},
                        {"critical_5pct", lr->critical_5pct},
                        {"reject", lr->reject}};
    std::cout << out.dump(2) << '\n';
  }
  const bool ok = std::all_of(models.begin(), models.end(), [](const auto& m) { return m.second.converged; });
  if (!ok) std::cerr << "error: the optimizer did not converge\n";
  return ok ? 0 : kExitNumerical;
}

std::vector<Eigen::Index> parse_subset(const std::vector<std::string>& names, Eigen::Index p, bool lambda_fixed) {
  std::vector<Eigen::Index> out;
  for (const auto& name : names) {
    if (name == "beta") {
      for (Eigen::Index j = 0; j < p; ++j) out.push_back(j);
    } else if (name == "alpha") {
      out.push_back(p);
    } else if (name == "lambda") {
      if (lambda_fixed) throw UsageError("--subset lambda is not available with --lambda-fixed");
      out.push_back(p + 1);
    } else if (name.rfind("beta", 0) == 0 && name.size() > 4 &&
               std::all_of(name.begin() + 4, name.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      const long j = std::stol(name.substr(4));
      if (j < 1 || j > p) throw UsageError("--subset " + name + ": design has " + std::to_string(p) + " columns");
      out.push_back(static_cast<Eigen::Index>(j - 1));
    } else {
      throw UsageError("--subset: unknown parameter '" + name + "'");
    }
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw UsageError("--subset lists a parameter twice");
  return out;
}

Eigen::Index default_covariate(const Dataset& d) {
  for (Eigen::Index j = 0; j < d.p(); ++j)
    if (d.X().col(j).maxCoeff() > d.X().col(j).minCoeff()) return j;
  throw UsageError("the design has no non-constant column");
}

int cmd_influence(const Options& o) {
  const Dataset d = ingest(o.run);
  const FitResult f = fit_checked(d, fit_options(o));
  if (!f.converged) {
    std::cerr << "error: the optimizer did not converge\n";
    return kExitNumerical;
  }
  const Quadrature quad(o.run.quadrature_order);
  const LikelihoodOptions lik = quad.likelihood();

  DeltaMatrix delta;
  if (o.scheme == "case") {
    delta = delta_case_weights(d, f.theta_hat, lik);
  } else if (o.scheme == "response") {
    delta = delta_response(d, f.theta_hat, lik);
  } else {
    Eigen::Index j = default_covariate(d);
    if (o.covariate_index) {
      if (*o.covariate_index < 1 || *o.covariate_index > d.p())
        throw UsageError("--covariate-index must lie in 1.." + std::to_string(d.p()));
      j = *o.covariate_index - 1;
    }
    delta = delta_covariate(d, f.theta_hat, j, lik);
  }
  if (delta.stationarity_warning)
    std::cerr << "warning: score max-norm " << format_double(delta.score_norm)
              << " at the estimate; the influence measures assume a stationary point\n";

  // A fixed lambda is not a parameter: drop its row and column.
  Eigen::MatrixXd info = observed_information(d, f.theta_hat, lik);
  if (f.lambda_fixed) {
    const Eigen::Index k = d.p() + 1;
    delta.values.conservativeResize(k, Eigen::NoChange);
    info = Eigen::MatrixXd(info.topLeftCorner(k, k));
  }
  const InfluenceReport r = o.subset.empty()
                                ? curvature_dmax(delta, info)
                                : curvature_dmax_subset(delta, info, parse_subset(o.subset, d.p(), f.lambda_fixed));

  std::vector<std::string> subset_names;
  if (r.subset)
    for (Eigen::Index j : *r.subset) subset_names.push_back(param_name(j, d.p()));

  if (use_csv(o)) {
    std::cout << "# schema=" << kSchema << " scheme=" << to_string(r.scheme) << " c_dmax=" << format_double(r.c_dmax);
    if (!subset_names.empty()) {
      std::cout << " subset=";
      for (std::size_t k = 0; k < subset_names.size(); ++k) std::cout << (k ? ";" : "") << subset_names[k];
    }
    std::cout << "\nindex,d_max_abs\n";
    for (Eigen::Index i = 0; i < d.n(); ++i) std::cout << i + 1 << ',' << format_double(r.d_max_abs(i)) << '\n';
  } else {
    json out;
    out["schema"] = kSchema;
    out["command"] = "influence";
    out["scheme"] = to_string(r.scheme);
    if (delta.scheme == Scheme::Covariate) out["covariate_index"] = delta.covariate + 1;
    out["scale_factor"] = num(delta.scale_factor);
    out["subset"] = subset_names.empty() ? json(nullptr) : json(subset_names);
    out["c_dmax"] = num(r.c_dmax);
    out["stationarity_warning"] = delta.stationarity_warning;
    json idx = json::array();
    for (Eigen::Index i = 0; i < d.n(); ++i) idx.push_back(i + 1);
    out["index"] = idx;
    out["d_max_abs"] = vec(r.d_max_abs);
    std::cout << out.dump(2) << '\n';
  }
  return 0;
}

int cmd_leverage(const Options& o) {
  const Dataset d = ingest(o.run);
  if (o.lambda_fixed) throw UsageError("leverage is computed for the skewed model; --lambda-fixed is not supported");
  const FitResult f = fit_checked(d, fit_options(o));
  if (!f.converged) {
    std::cerr << "error: the optimizer did not converge\n";
    return kExitNumerical;
  }
  const Quadrature quad(o.run.quadrature_order);
  const LeverageMatrix gl = generalized_leverage(d, f.theta_hat, quad.likelihood());
  if (use_csv(o)) {
    std::cout << "# schema=" << kSchema << " generalized leverage\n";
    if (o.full_matrix) {
      std::cout << "index";
      for (Eigen::Index l = 0; l < d.n(); ++l) std::cout << ",y" << l + 1;
      std::cout << '\n';
      for (Eigen::Index i = 0; i < d.n(); ++i) {
        std::cout << i + 1;
        for (Eigen::Index l = 0; l < d.n(); ++l) std::cout << ',' << format_double(gl.values(i, l));
        std::cout << '\n';
      }
    } else {
      std::cout << "index,gl_ii\n";
      for (Eigen::Index i = 0; i < d.n(); ++i) std::cout << i + 1 << ',' << format_double(gl.values(i, i)) << '\n';
    }
  } else {
    json out;
    out["schema"] = kSchema;
    out["command"] = "leverage";
    json idx = json::array();
    for (Eigen::Index i = 0; i < d.n(); ++i) idx.push_back(i + 1);
    out["index"] = idx;
    out["diagonal"] = vec(gl.diagonal());
    if (o.full_matrix) {
      json rows = json::array();
      for (Eigen::Index i = 0; i < d.n(); ++i) rows.push_back(vec(gl.values.row(i).transpose()));
      out["matrix"] = rows;
    }
    std::cout << out.dump(2) << '\n';
  }
  return 0;
}

std::vector<Eigen::Index> parse_drop(const std::vector<std::string>& items, Eigen::Index n) {
  std::vector<Eigen::Index> out;
  if (items.size() == 1 && items[0] == "all") {
    for (Eigen::Index i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  for (const auto& s : items) {
    if (s.empty()) continue;
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != s.size()) throw UsageError("--drop: '" + s + "' is not a case number");
    if (v < 1 || v > n) throw UsageError("--drop: case " + s + " is outside 1.." + std::to_string(n));
    out.push_back(static_cast<Eigen::Index>(v - 1));
  }
  std::vector<Eigen::Index> sorted = out;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw UsageError("--drop lists a case twice");
  return out;
}

int cmd_rc(const Options& o) {
  const Dataset d = ingest(o.run);
  const std::vector<Eigen::Index> drop = parse_drop(o.drop, d.n());
  const FitOptions fo = fit_options(o);
  const FitResult base = fit_checked(d, fo);
  if (!base.converged) {
    std::cerr << "error: the optimizer did not converge on the full data\n";
    return kExitNumerical;
  }
  const auto rows = relative_changes(d, base, drop, fo);
  const Eigen::Index k = base.theta_hat.size();
  const Eigen::Index p = d.p();

  if (use_csv(o)) {
    std::cout << "case";
    for (Eigen::Index j = 0; j < k; ++j) std::cout << ",rc_" << param_name(j, p);
    for (Eigen::Index j = 0; j < k; ++j) std::cout << ",se_" << param_name(j, p);
    std::cout << ",converged,error\n";
    for (const auto& r : rows) {
      std::cout << r.dropped_index + 1;
      for (Eigen::Index j = 0; j < k; ++j) std::cout << ',' << cell(r.rc(j));
      for (Eigen::Index j = 0; j < k; ++j) std::cout << ',' << cell(r.se_after(j));
      std::string err = r.error;
      std::replace(err.begin(), err.end(), ',', ';');
      std::cout << ',' << (r.converged ? 1 : 0) << ',' << err << '\n';
    }
  } else {
    json out;
    out["schema"] = kSchema;
    out["command"] = "rc";
    out["parameters"] = json::array();
    for (Eigen::Index j = 0; j < k; ++j) out["parameters"].push_back(param_name(j, p));
    out["baseline"] = model_json(base.lambda_fixed ? "lambda-fixed" : "skewed", base);
    out["rows"] = json::array();
    for (const auto& r : rows) {
      json row;
      row["case"] = r.dropped_index + 1;
      row["rc"] = vec(r.rc);
      row["se_after"] = vec(r.se_after);
      row["estimate_after"] = r.theta_after.beta.size() ? vec(r.theta_after.to_vector()) : json(nullptr);
      row["converged"] = r.converged;
      row["error"] = r.error.empty() ? json(nullptr) : json(r.error);
      out["rows"].push_back(row);
    }
    std::cout << out.dump(2) << '\n';
  }
  for (const auto& r : rows)
    if (!r.error.empty()) std::cerr << "warning: case " << r.dropped_index + 1 << ": " << r.error << '\n';
  return 0;
}

int cmd_simulate(const Options& o) {
  if (o.beta.empty()) throw UsageError("--beta is required");
  if (o.n < 2) throw UsageError("--n must be at least 2");
  const Eigen::Index p = static_cast<Eigen::Index>(o.beta.size());
  const bool intercept = o.run.intercept;

  Eigen::MatrixXd X;
  if (!o.run.input_path.empty()) {
    const std::vector<std::string>& cols = o.run.covariate_columns;
    if (cols.empty()) throw UsageError("--covariates is required with --input");
    const CsvTable table = read_csv(o.run.input_path);
    Eigen::MatrixXd Xd(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(cols.size()) + (intercept ? 1 : 0));
    for (Eigen::Index i = 0; i < Xd.rows(); ++i) {
      if (intercept) Xd(i, 0) = 1.0;
      for (std::size_t c = 0; c < cols.size(); ++c) {
        double v = table.rows[static_cast<std::size_t>(i)][table.column(cols[c])];
        if (std::find(o.run.log_covariates.begin(), o.run.log_covariates.end(), cols[c]) != o.run.log_covariates.end()) {
          if (!(v > 0.0)) throw DomainError("row " + std::to_string(i + 1) + ": column '" + cols[c] + "' must be positive to take its log");
          v = std::log(v);
        }
        Xd(i, static_cast<Eigen::Index>(c) + (intercept ? 1 : 0)) = v;
      }
    }
    X = std::move(Xd);
  } else {
    std::seed_seq seq{o.run.seed, std::uint64_t{0x5eed}};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    X.resize(o.n, p);
    for (Eigen::Index i = 0; i < o.n; ++i)
      for (Eigen::Index j = 0; j < p; ++j) X(i, j) = (intercept && j == 0) ? 1.0 : unif(rng);
  }
  if (X.cols() != p)
    throw UsageError("--beta has " + std::to_string(p) + " entries but the design has " + std::to_string(X.cols()) + " columns");

  ModelParams theta;
  theta.beta = Eigen::Map<const Eigen::VectorXd>(o.beta.data(), p);
  theta.alpha = o.alpha;
  theta.lambda = o.lambda;
  const Quadrature quad(o.run.quadrature_order);
  const Dataset d = simulate(X, theta, o.run.seed, quad.rule ? *quad.rule : default_rule());

  if (o.output.empty() || o.output == "-") {
    write_dataset_csv(std::cout, d, intercept);
  } else {
    std::ofstream out(o.output, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + o.output + "'");
    write_dataset_csv(out, d, intercept);
  }
  return 0;
}

void add_data_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--input", o.run.input_path, "CSV file with a header row")->required();
  cmd->add_option("--response", o.run.response_column, "response column")->required();
  cmd->add_option("--covariates", o.run.covariate_columns, "covariate columns")->delimiter(',');
  cmd->add_flag("--log-response", o.run.log_response, "take the natural log of the response");
  cmd->add_option("--log-covariates", o.run.log_covariates, "covariates to log-transform")->delimiter(',');
  cmd->add_flag("--no-intercept{false}", o.run.intercept, "omit the intercept column");
  cmd->add_option("--lambda-fixed", o.lambda_fixed, "hold lambda at this value");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skewed log-Birnbaum-Saunders regression: fitting and influence diagnostics"};
  app.require_subcommand(1);
  Options o;

  int quad_order = kDefaultQuadOrder;
  try {
    quad_order = quad_order_from_env();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  app.add_option("--quad-order", quad_order, "Gauss-Legendre points per panel (env SKEWBS_QUAD_ORDER)");
  app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", o.run.seed, "random seed");

  auto* fit_cmd = app.add_subcommand("fit", "fit the skewed and log-BS models and test lambda = 0");
  add_data_options(fit_cmd, o);

  auto* infl = app.add_subcommand("influence", "local influence |d_max| index data");
  add_data_options(infl, o);
  infl->add_option("--scheme", o.scheme, "perturbation scheme")->check(CLI::IsMember({"case", "response", "covariate"}));
  infl->add_option("--covariate-index", o.covariate_index, "1-based design column for --scheme covariate");
  infl->add_option("--subset", o.subset, "parameters of interest: beta, betaJ, alpha, lambda")->delimiter(',');

  auto* lev = app.add_subcommand("leverage", "generalized leverage");
  add_data_options(lev, o);
  lev->add_flag("--full", o.full_matrix, "emit the full n x n matrix");

  auto* rc = app.add_subcommand("rc", "relative changes after deleting cases");
  add_data_options(rc, o);
  rc->add_option("--drop", o.drop, "1-based cases to delete, or 'all'")->delimiter(',');

  auto* sim = app.add_subcommand("simulate", "draw a dataset from the model");
  sim->add_option("--n", o.n, "number of observations (unit-uniform design)");
  sim->add_option("--beta", o.beta, "regression coefficients, intercept first")->delimiter(',')->required();
  sim->add_option("--alpha", o.alpha, "shape parameter")->required();
  sim->add_option("--lambda", o.lambda, "skewness parameter");
  sim->add_option("--input", o.run.input_path, "CSV supplying the design columns");
  sim->add_option("--covariates", o.run.covariate_columns, "design columns taken from --input")->delimiter(',');
  sim->add_option("--log-covariates", o.run.log_covariates, "design columns to log-transform")->delimiter(',');
  sim->add_flag("--no-intercept{false}", o.run.intercept, "omit the intercept column");
  sim->add_option("--output", o.output, "output file (default stdout)");

  for (auto* cmd : {fit_cmd, infl, lev, rc, sim}) {
    cmd->add_option("--quad-order", quad_order, "Gauss-Legendre points per panel (env SKEWBS_QUAD_ORDER)");
    cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", o.run.seed, "random seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  o.run.quadrature_order = quad_order;
  o.run.output_format = o.format == "csv" ? OutputFormat::Csv : OutputFormat::Json;

  try {
    if (*fit_cmd) return cmd_fit(o);
    if (*infl) return cmd_influence(o);
    if (*lev) return cmd_leverage(o);
    if (*rc) return cmd_rc(o);
    if (*sim) return cmd_simulate(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: ParseError: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConstantColumnError& e) {
    std::cerr << "error: ConstantColumnError: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: DomainError: " << e.what() << '\n';
    return kExitUsage;
  } catch (const RankError& e) {
    std::cerr << "error: RankError: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
