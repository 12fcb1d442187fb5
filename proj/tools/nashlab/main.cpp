// nashlab command line: thin wrappers over the library, files in and out.
#include <bit>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nashlab/acceptance.hpp"
#include "nashlab/brouwer.hpp"
#include "nashlab/calibration.hpp"
#include "nashlab/code.hpp"
#include "nashlab/embed.hpp"
#include "nashlab/eol.hpp"
#include "nashlab/game.hpp"
#include "nashlab/lift.hpp"
#include "nashlab/locality.hpp"
#include "nashlab/pipeline.hpp"

using namespace nashlab;
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string profile = "desk";
  fs::path out = "nashlab-out";
};

// Input files default to the pipeline's artifact names under --out.
struct Inputs {
  std::string instance, composed, code, family, point, strategy_a, strategy_b;
};

std::string or_default(const std::string& given, const Globals& g, const char* file) {
  return given.empty() ? (g.out / file).string() : given;
}

int vertex_bits(const EolInstance& inst) {
  return std::bit_width(inst.num_vertices() - 1);
}

VertexCode load_vertex_code(const std::string& path, int n) {
  VertexCode vc;
  vc.half = read_code(read_text_file(path));
  vc.na = n / 2;
  vc.nb = n - vc.na;
  return vc;
}

void emit(const Globals& g, const std::string& file, const std::string& text) {
  fs::create_directories(g.out);
  write_text_file(g.out / file, text);
  std::cout << "wrote " << (g.out / file).string() << "\n";
}

void print_json(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

ordered_json regret_json(const RegretReport& r) {
  return {{"pass", r.pass},
          {"eps", r.eps},
          {"max_regret_a", r.max_regret_a},
          {"max_regret_b", r.max_regret_b},
          {"gain_a", r.gain_a},
          {"gain_b", r.gain_b},
          {"regrets_a", r.regrets_a},
          {"regrets_b", r.regrets_b}};
}

// Everything the game commands need, loaded from files.
struct GameBundle {
  ComposedInstance ci;
  VertexCode code;
  SubsetFamily family;
  ConstantsProfile profile;
  std::unique_ptr<ImitationGame> game;
  std::unique_ptr<BrouwerField> field;
};

GameBundle load_game(const Globals& g, const Inputs& in) {
  GameBundle b;
  b.profile = resolve_profile(g.profile);
  b.ci = read_composed(read_text_file(or_default(in.composed, g, "composed.txt")));
  EolInstance inst = decode_composed(b.ci);
  b.code = load_vertex_code(or_default(in.code, g, "code.txt"), vertex_bits(inst));
  b.family = read_family(read_text_file(or_default(in.family, g, "family.txt")));
  b.game = std::make_unique<ImitationGame>(build_game(b.ci, b.code, b.family, b.profile));
  b.field = std::make_unique<BrouwerField>(inst, b.code, b.profile);
  return b;
}

struct FieldBundle {
  ConstantsProfile profile;
  std::unique_ptr<BrouwerField> field;
};

FieldBundle load_field(const Globals& g, const Inputs& in) {
  FieldBundle b;
  b.profile = resolve_profile(g.profile);
  EolInstance inst = read_instance(read_text_file(or_default(in.instance, g, "instance.eol")));
  VertexCode code = load_vertex_code(or_default(in.code, g, "code.txt"), vertex_bits(inst));
  b.field = std::make_unique<BrouwerField>(inst, code, b.profile);
  return b;
}

std::pair<StrategyA, StrategyB> load_profile_pair(const Globals& g, const Inputs& in) {
  return {read_strategy_a(read_text_file(or_default(in.strategy_a, g, "strategy_a.txt"))),
          read_strategy_b(read_text_file(or_default(in.strategy_b, g, "strategy_b.txt")))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nashlab: end-of-line to Brouwer to imitation-game laboratory"};
  app.require_subcommand(1);
  Globals g;
  Inputs in;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--profile", g.profile, "profile name or JSON path")->capture_default_str();
  app.add_option("--out", g.out, "output directory")->capture_default_str();

  auto add_file = [](CLI::App* c, const std::string& flag, std::string& dst, const std::string& what) {
    c->add_option(flag, dst, what + " (default: under --out)");
  };

  // ---- embed ----
  int cn = 10, cd = 16;
  std::uint64_t ctrials = 500;
  bool no_audit = false;
  auto* csim = app.add_subcommand("congestion-sim", "path-embedding congestion experiment");
  csim->add_option("--n", cn)->capture_default_str();
  csim->add_option("--d", cd)->capture_default_str();
  csim->add_option("--trials", ctrials)->capture_default_str();
  csim->add_flag("--no-audit", no_audit, "skip the disjointness audit");

  std::string solver = "canonical";
  std::uint64_t dN = 64, dtrials = 10000;
  auto* dich = app.add_subcommand("dichotomy", "canonical vs non-canonical hit rates");
  dich->add_option("--solver", solver)->check(CLI::IsMember({"canonical", "noncanonical", "coin"}));
  dich->add_option("--N", dN)->capture_default_str();
  dich->add_option("--trials", dtrials)->capture_default_str();

  int kn = 10, kd = 16;
  std::uint64_t ktrials = 500;
  auto* coup = app.add_subcommand("coupling", "coupling failure rate");
  coup->add_option("--n", kn)->capture_default_str();
  coup->add_option("--d", kd, "multiplicity cap; negative disables")->capture_default_str();
  coup->add_option("--trials", ktrials)->capture_default_str();

  // ---- brouwer ----
  auto* bb = app.add_subcommand("build-brouwer", "summarize the Brouwer path of an instance");
  add_file(bb, "--instance", in.instance, "instance file");
  add_file(bb, "--code", in.code, "code file");

  auto* ef = app.add_subcommand("eval-f", "evaluate f at a point");
  add_file(ef, "--instance", in.instance, "instance file");
  add_file(ef, "--code", in.code, "code file");
  ef->add_option("--point", in.point, "point file")->required();

  int lsamples = 100000, lboundary = 10000;
  auto* cl = app.add_subcommand("check-lipschitz", "empirical Lipschitz constants");
  add_file(cl, "--instance", in.instance, "instance file");
  add_file(cl, "--code", in.code, "code file");
  cl->add_option("--samples", lsamples)->capture_default_str();
  cl->add_option("--boundary", lboundary)->capture_default_str();

  auto* ff = app.add_subcommand("find-fixed-point", "local search at each path endpoint");
  add_file(ff, "--instance", in.instance, "instance file");
  add_file(ff, "--code", in.code, "code file");

  double dtol = calibration::kFixedPointResidual;
  auto* dfp = app.add_subcommand("decode-fp", "decode an approximate fixed point");
  add_file(dfp, "--instance", in.instance, "instance file");
  add_file(dfp, "--code", in.code, "code file");
  add_file(dfp, "--point", in.point, "point file");
  dfp->add_option("--tol", dtol)->capture_default_str();

  // ---- game ----
  auto game_inputs = [&](CLI::App* c, bool strategies) {
    add_file(c, "--composed", in.composed, "composed instance");
    add_file(c, "--code", in.code, "code file");
    add_file(c, "--family", in.family, "subset family");
    if (strategies) {
      add_file(c, "--strategy-a", in.strategy_a, "Alice's strategy");
      add_file(c, "--strategy-b", in.strategy_b, "Bob's strategy");
    }
  };
  auto* bg = app.add_subcommand("build-game", "summarize the imitation game");
  game_inputs(bg, false);

  auto* pl = app.add_subcommand("plant", "natural profile at a fixed point");
  game_inputs(pl, false);
  add_file(pl, "--point", in.point, "fixed point file");

  double geps = calibration::kPlantEpsilon;
  auto* cw = app.add_subcommand("check-wsne", "well-supported equilibrium check");
  game_inputs(cw, true);
  cw->add_option("--eps", geps)->capture_default_str();
  auto* ca = app.add_subcommand("check-ane", "approximate equilibrium check");
  game_inputs(ca, true);
  ca->add_option("--eps", geps)->capture_default_str();
  auto* pr = app.add_subcommand("prune", "prune an eps-ANE to a WSNE");
  game_inputs(pr, true);
  pr->add_option("--eps", geps)->capture_default_str();

  std::string which = "xhat";
  auto* ex = app.add_subcommand("extract", "extract the point a strategy represents");
  game_inputs(ex, true);
  ex->add_option("--which", which)->check(CLI::IsMember({"xa", "xb", "xhat"}))->capture_default_str();

  double kbound = calibration::kResidualK;
  auto* vr = app.add_subcommand("verify-reduction", "equilibrium to fixed point to solution");
  game_inputs(vr, true);
  vr->add_option("--eps", geps)->capture_default_str();
  vr->add_option("--K", kbound, "residual^2 bound in units of eps_B")->capture_default_str();

  // ---- cli ----
  PipelineConfig pc;
  auto* pipe = app.add_subcommand("pipeline", "run the staged pipeline");
  pipe->add_option("--n", pc.n)->capture_default_str();
  pipe->add_option("--d", pc.d)->capture_default_str();
  pipe->add_option("--ell", pc.ell)->capture_default_str();
  pipe->add_option("--k", pc.k)->capture_default_str();
  pipe->add_option("--stages", pc.stages, "subset of instance,lift,code,family,brouwer,game,verify")
      ->delimiter(',');

  std::vector<int> only;
  auto* acc = app.add_subcommand("acceptance", "run the acceptance suite");
  acc->add_option("--only", only, "criterion ids")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*csim) {
      auto r = congestion_simulation(cn, cd, ctrials, g.seed, !no_audit);
      print_json({{"n", cn}, {"d", cd}, {"trials", r.trials}, {"bot", r.bot}, {"bot_rate", r.bot_rate()},
                  {"violations", r.violations}, {"max_congestion", r.max_congestion},
                  {"histogram", r.histogram}});
    } else if (*dich) {
      auto r = dichotomy_experiment(solver_by_name(solver), dN, dtrials, g.seed);
      print_json({{"solver", solver}, {"N", dN}, {"trials", dtrials}, {"p_canonical", r.p_canonical},
                  {"best_deletion_hit_rate", r.best_deletion_hit_rate},
                  {"best_shortcut_hit_rate", r.best_shortcut_hit_rate},
                  {"tolerance", r.tolerance}, {"passes", r.passes}});
    } else if (*coup) {
      print_json({{"n", kn}, {"d", kd}, {"trials", ktrials},
                  {"failure_rate", coupling_failure_rate(kn, ktrials, kd, g.seed)}});
    } else if (*bb) {
      auto b = load_field(g, in);
      const auto& F = *b.field;
      auto sep = check_separation(F.chain());
      ordered_json eps = ordered_json::array();
      for (const auto& e : F.endpoints())
        eps.push_back({{"segment", e.segment}, {"vertex", e.vertex}, {"at_end", e.at_end}});
      print_json({{"m", F.m()}, {"dim", F.dim()}, {"segments", F.chain().segments().size()},
                  {"endpoints", eps}, {"min_separation", sep.min_distance},
                  {"eta", b.profile.eta()}});
    } else if (*ef) {
      auto b = load_field(g, in);
      int m = 0;
      Point x = read_point(read_text_file(in.point), &m);
      auto loc = b.field->locate(x);
      std::cerr << "location " << to_string(loc.classification) << " residual "
                << b.field->residual(x) << "\n";
      emit(g, "f.txt", write_point(b.field->f(x), m, b.profile.eps_precision));
    } else if (*cl) {
      auto b = load_field(g, in);
      Rng rng = make_rng(g.seed, "experiments");
      auto r = check_lipschitz(*b.field, lsamples, rng, lboundary);
      print_json({{"lipschitz", r.lipschitz}, {"coordinatewise", r.coordinatewise},
                  {"boundary_gap", r.boundary_gap}, {"pairs", r.pairs},
                  {"bound", calibration::kLipschitzBound}});
    } else if (*ff) {
      auto b = load_field(g, in);
      const auto& F = *b.field;
      ordered_json rows = ordered_json::array();
      int idx = 0;
      for (const auto& e : F.endpoints()) {
        auto fp = find_fixed_point(F, e);
        std::string file = idx == 0 ? "fixed_point.txt" : "fixed_point_" + std::to_string(idx) + ".txt";
        emit(g, file, write_point(fp.x, F.m(), b.profile.eps_precision));
        rows.push_back({{"segment", e.segment}, {"vertex", e.vertex}, {"residual", fp.residual},
                        {"iterations", fp.iterations}, {"file", file}});
        ++idx;
      }
      print_json(rows);
    } else if (*dfp) {
      auto b = load_field(g, in);
      Point x = read_point(read_text_file(or_default(in.point, g, "fixed_point.txt")));
      auto sol = decode_fixed_point(*b.field, x, dtol);
      print_json({{"vertex", sol.vertex}, {"label", sol.label.str()}, {"reason", to_string(sol.reason)},
                  {"residual", b.field->residual(x)}});
    } else if (*bg) {
      auto b = load_game(g, in);
      const auto& s = b.game->spec();
      int n = vertex_bits(decode_composed(b.ci));
      print_json({{"n", n}, {"m", s.m()}, {"subsets", s.family.count()},
                  {"pointer_width", s.pointer_width()}, {"alpha_width", s.alpha_width()},
                  {"legal_half_pairs", count_legal_pairs(n)}, {"inter_norm", s.inter_norm()}});
    } else if (*pl) {
      auto b = load_game(g, in);
      Point x = read_point(read_text_file(or_default(in.point, g, "fixed_point.txt")));
      auto [A, B] = plant_equilibrium(*b.game, *b.field, x, calibration::kFixedPointResidual);
      emit(g, "strategy_a.txt", write_strategy(A));
      emit(g, "strategy_b.txt", write_strategy(B));
    } else if (*cw || *ca) {
      auto b = load_game(g, in);
      auto [A, B] = load_profile_pair(g, in);
      auto r = *cw ? check_wsne(*b.game, A, B, geps) : check_ane(*b.game, A, B, geps);
      print_json(regret_json(r));
      return r.pass ? 0 : 1;
    } else if (*pr) {
      auto b = load_game(g, in);
      auto [A, B] = load_profile_pair(g, in);
      auto [A2, B2] = prune_ane_to_wsne(*b.game, A, B, geps);
      emit(g, "strategy_a.pruned.txt", write_strategy(A2));
      emit(g, "strategy_b.pruned.txt", write_strategy(B2));
    } else if (*ex) {
      auto b = load_game(g, in);
      auto [A, B] = load_profile_pair(g, in);
      int m = b.game->spec().m();
      auto e = which == "xa" ? extract_point(A, b.family, m) : extract_point(B, b.family, m, which == "xhat");
      std::cerr << "uncovered coordinates: " << e.uncovered << "\n";
      emit(g, "extracted_" + which + ".txt", write_point(e.x, m, b.profile.eps_precision));
    } else if (*vr) {
      auto b = load_game(g, in);
      auto [A, B] = load_profile_pair(g, in);
      auto r = verify_reduction(*b.game, *b.field, A, B, geps, kbound * b.profile.eps_brouwer);
      print_json({{"wsne", regret_json(r.wsne)}, {"residual", r.residual}, {"residual_sq", r.residual_sq},
                  {"uncovered", r.uncovered}, {"vertex", r.solution.vertex},
                  {"reason", to_string(r.solution.reason)}});
    } else if (*pipe) {
      pc.seed = g.seed;
      pc.profile = g.profile;
      pc.out_dir = g.out;
      auto man = run_pipeline(pc);
      std::cout << man.json;
    } else if (*acc) {
      AcceptanceOptions opt;
      opt.seed = g.seed;
      opt.profile = resolve_profile(g.profile);
      opt.only = only;
      bool all = true;
      run_acceptance(opt, [&](const CriterionResult& r) {
        std::cout << format_result(r) << std::endl;
        all = all && r.pass;
      });
      return all ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
