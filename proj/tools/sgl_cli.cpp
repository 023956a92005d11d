// Copyright 2026 The sgl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: each subcommand runs one experiment and prints or
// writes its report. Exit codes: 0 ok, 1 non-convergence, 2 config error,
// 3 budget exceeded.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgl.hpp"

namespace {

struct Common {
  std::optional<std::uint32_t> n, t, s;
  std::optional<std::uint64_t> p;
  std::uint64_t seed = 0;
  std::optional<std::size_t> samples;
  std::optional<double> tol;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--n", c.n, "Number of bits or qubits");
  app->add_option("--t", c.t, "Moment order");
  app->add_option("--s", c.s, "Register width parameter");
  app->add_option("--p", c.p, "Prime");
  app->add_option("--seed", c.seed, "Random seed");
  app->add_option("--samples", c.samples, "Sample count");
  app->add_option("--tol", c.tol, "Eigen-solver tolerance");
  app->add_option("--out", c.out, "Output file (stdout when empty)");
  app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

nlohmann::json common_params(const Common& c) {
  nlohmann::json p = nlohmann::json::object();
  if (c.n) p["n"] = *c.n;
  if (c.t) p["t"] = *c.t;
  if (c.s) p["s"] = *c.s;
  if (c.p) p["p"] = *c.p;
  if (c.samples) p["samples"] = *c.samples;
  if (c.tol) p["tol"] = *c.tol;
  return p;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw sgl::ConfigError("cannot open output file " + path);
  f << text;
}

int emit_result(const sgl::RunResult& r, const Common& c) {
  if (c.format == "csv") {
    emit(r.csv.empty() ? sgl::flat_csv(r.report) : r.csv, c.out);
  } else {
    nlohmann::json doc = r.report;
    doc["build"] = SGL_BUILD_HASH;
    doc["rng"] = sgl::SeededRng::algorithm();
    emit(doc.dump(2) + "\n", c.out);
  }
  return r.converged ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral-gap and design experiments"};
  app.require_subcommand(1);
  Common common;
  nlohmann::json extra = nlohmann::json::object();
  std::string experiment;

  std::string ensemble = "rev-all-to-all", graph = "path", kind, sampler = "rev", boundary = "periodic";
  std::vector<std::uint32_t> bsizes;
  std::uint32_t a = 2, c = 2;
  std::size_t c1 = 1, c2 = 1, k = 0, limit = 444;
  double eps = 0.01, cdesign = 1.0, L = 1e6, delta = 0.1;
  std::string config_path;

  auto* gap = app.add_subcommand("gap", "Essential norm of a permutation ensemble");
  gap->add_option("--ensemble", ensemble, "rev-all-to-all | rev-path | rev-cycle | beta | consecutive-triples | kassabov-triples");
  auto* pzp = app.add_subcommand("pzp", "Exact partial-zero-preservation value");
  auto* overlap = app.add_subcommand("overlap", "Overlapping-factor norm sweep over |B|");
  overlap->add_option("--a", a);
  overlap->add_option("--c", c);
  overlap->add_option("--b", bsizes, "Sizes of the middle factor");
  auto* cayley = app.add_subcommand("cayley", "SWAP Cayley walk on an architecture graph");
  cayley->add_option("--graph", graph)->check(CLI::IsMember({"path", "star", "cycle", "complete"}));
  auto* kv = app.add_subcommand("kassabov-verify", "Exhaustive checks of the generator circuits at s = 1");
  kv->add_option("--limit", limit, "Number of generators to check");
  auto* caprace = app.add_subcommand("caprace", "Generators of Alt(p^3 - 1) and their t = 1 walk");
  auto* quantum = app.add_subcommand("quantum", "Quantum moment operators");
  quantum->add_option("--kind", kind, "lrqc | brickwork | hamiltonian | composite | haar");
  quantum->add_option("--boundary", boundary)->check(CLI::IsMember({"open", "periodic"}));
  quantum->add_option("--c1", c1);
  quantum->add_option("--c2", c2);
  auto* design = app.add_subcommand("design-test", "Statistical t-wise independence test");
  design->add_option("--sampler", sampler)->check(CLI::IsMember({"rev", "uniform"}));
  design->add_option("--k", k, "Walk length (0 derives it from the measured gap)");
  design->add_option("--eps", eps);
  design->add_option("--c", cdesign);
  auto* calc = app.add_subcommand("calc", "Counting and design-length calculators");
  calc->add_option("--kind", kind, "design-length | kazhdan | reversible-count | complexity");
  calc->add_option("--L", L);
  calc->add_option("--delta", delta);
  calc->add_option("--eps", eps);
  auto* runcfg = app.add_subcommand("run-config", "Run every experiment of a JSON config");
  runcfg->add_option("config", config_path, "Config file")->required();

  for (auto* sub : {gap, pzp, overlap, cayley, kv, caprace, quantum, design, calc, runcfg}) add_common(sub, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (runcfg->parsed()) {
      std::ifstream f(config_path);
      if (!f) throw sgl::ConfigError("cannot read config " + config_path);
      nlohmann::json cfg;
      try {
        cfg = nlohmann::json::parse(f);
      } catch (const nlohmann::json::exception& e) {
        throw sgl::ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
      return emit_result(sgl::run(cfg), common);
    }

    nlohmann::json params = common_params(common);
    sgl::ExperimentConfig cfg;
    cfg.seed = common.seed;
    if (gap->parsed()) {
      cfg.name = "gap";
      params["ensemble"] = ensemble;
    } else if (pzp->parsed()) {
      cfg.name = "pzp";
    } else if (overlap->parsed()) {
      cfg.name = "overlap";
      params["a"] = a;
      params["c"] = c;
      if (!bsizes.empty()) params["b"] = bsizes;
    } else if (cayley->parsed()) {
      cfg.name = "cayley";
      params["graph"] = graph;
    } else if (kv->parsed()) {
      cfg.name = "kassabov-verify";
      params["limit"] = limit;
    } else if (caprace->parsed()) {
      cfg.name = "caprace";
    } else if (quantum->parsed()) {
      cfg.name = "quantum";
      if (!kind.empty()) params["kind"] = kind;
      params["boundary"] = boundary;
      params["c1"] = c1;
      params["c2"] = c2;
    } else if (design->parsed()) {
      cfg.name = "design-test";
      params["sampler"] = sampler;
      params["k"] = k;
      params["eps"] = eps;
      params["c"] = cdesign;
    } else if (calc->parsed()) {
      cfg.name = "calc";
      if (!kind.empty()) params["kind"] = kind;
      params["L"] = L;
      params["delta"] = delta;
      params["eps"] = eps;
    }
    cfg.params = params;
    sgl::RunResult r = sgl::run_experiment(cfg);
    r.report["config"] = cfg.to_json();
    return emit_result(r, common);
  } catch (const sgl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const sgl::BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return 3;
  } catch (const sgl::ConvergenceError& e) {
    std::cerr << "did not converge: " << e.what() << '\n';
    return 1;
  } catch (const std::out_of_range& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
}
