#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fintop/fintop.hpp"

namespace {

struct Common {
  std::string format = "text";
  std::string output;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--format", c.format, "report format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();
  cmd->add_option("--output", c.output, "write the report to this file instead of stdout");
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file " + path);
  out << text;
}

const std::vector<std::string> kHypothesisNames = {"closed", "path-connected", "locally-product"};

unsigned hypothesis_bit(const std::string& name) {
  if (name == "closed") return fintop::kClosed;
  if (name == "path-connected") return fintop::kPathConnected;
  return fintop::kLocallyProduct;
}

struct SweepCli {
  fintop::SweepConfig cfg;
  std::vector<std::string> drop;
  std::vector<std::string> require;
  bool empty_disconnected = false;
  Common common;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* samples_opt = nullptr;
};

void add_sweep_options(CLI::App* cmd, SweepCli& s, bool fences) {
  const int side_max = fences ? 3 : 4;
  cmd->add_option("--nx", s.cfg.nx, "points in each X space")
      ->required()
      ->check(CLI::Range(1, side_max));
  cmd->add_option("--ny", s.cfg.ny, "points in each Y space")
      ->required()
      ->check(CLI::Range(1, side_max));
  cmd->add_option("--drop", s.drop, "hypothesis to drop from the required set (repeatable)")
      ->check(CLI::IsMember(kHypothesisNames));
  cmd->add_option("--require", s.require,
                  "required hypothesis (repeatable; replaces the default full set)")
      ->check(CLI::IsMember(kHypothesisNames));
  cmd->add_option("--workers", s.cfg.workers, "worker threads")
      ->envname("FINTOP_WORKERS")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();
  if (!fences) {
    s.seed_opt = cmd->add_option("--seed", s.cfg.seed, "sampling seed (4-point sides only)")
                     ->capture_default_str();
    s.samples_opt = cmd->add_option("--samples", s.cfg.samples, "sample count (4-point sides only)")
                        ->capture_default_str();
  }
  cmd->add_option("--max-findings", s.cfg.max_findings, "findings listed in the report")
      ->check(CLI::Range(0, 4096))
      ->capture_default_str();
  if (fences)
    cmd->add_option("--max-length", s.cfg.max_fence_len, "maximum fence length")
        ->check(CLI::Range(1, 16))
        ->capture_default_str();
  cmd->add_flag("--empty-disconnected", s.empty_disconnected,
                "treat the empty subset as not path-connected");
  add_common(cmd, s.common);
}

fintop::SweepConfig finish_sweep_config(SweepCli& s, fintop::SweepMode mode) {
  s.cfg.mode = mode;
  if (!s.require.empty() && !s.drop.empty())
    throw std::invalid_argument("--require and --drop are mutually exclusive");
  if (!s.require.empty()) {
    s.cfg.require = 0;
    for (const std::string& name : s.require) s.cfg.require |= hypothesis_bit(name);
  }
  for (const std::string& name : s.drop) s.cfg.require &= ~hypothesis_bit(name);
  s.cfg.empty_is_path_connected = !s.empty_disconnected;
  if (s.seed_opt && (s.seed_opt->count() || s.samples_opt->count()) && !s.cfg.sampling())
    throw std::invalid_argument("--seed and --samples apply only when a side has 4 points");
  return s.cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exhaustive product-decomposition checks on finite topological spaces"};
  app.require_subcommand(1);

  struct {
    int points = 2;
    bool distinct = false;
    Common common;
  } enum_args;
  CLI::App* cmd_enumerate =
      app.add_subcommand("enumerate", "list every topology on n labeled points");
  cmd_enumerate->add_option("--points", enum_args.points, "points per space")
      ->required()
      ->check(CLI::Range(1, 4));
  cmd_enumerate->add_flag("--distinct-up-to-iso", enum_args.distinct,
                          "list one representative per homeomorphism class");
  add_common(cmd_enumerate, enum_args.common);

  struct {
    std::string file;
    bool emit = false;
    bool strict_relations = false;
    Common common;
  } analyze_args;
  CLI::App* cmd_analyze =
      app.add_subcommand("analyze", "evaluate one subset of one product of two spaces");
  cmd_analyze->add_option("file", analyze_args.file, "space file with two spaces and one subset")
      ->required();
  cmd_analyze->add_flag("--emit", analyze_args.emit,
                        "print the normalized input back instead of analyzing");
  cmd_analyze->add_flag("--strict-relations", analyze_args.strict_relations,
                        "reject rel sets that are not transitively closed");
  add_common(cmd_analyze, analyze_args.common);

  SweepCli verify_args, search_args, fences_args;
  CLI::App* cmd_verify = app.add_subcommand(
      "verify", "sweep all products and assert exact decomposition under the required hypotheses");
  add_sweep_options(cmd_verify, verify_args, false);
  CLI::App* cmd_search = app.add_subcommand(
      "search", "sweep all products and report subsets that satisfy the hypotheses but fail");
  add_sweep_options(cmd_search, search_args, false);
  CLI::App* cmd_fences = app.add_subcommand(
      "fences", "check mixed coordinate pairs along every fence of every qualifying subset");
  add_sweep_options(cmd_fences, fences_args, true);

  struct {
    std::string file;
    bool strict = false;
    bool strict_relations = false;
    Common common;
  } c2s_args, c2m_args;
  CLI::App* cmd_c2s = app.add_subcommand("check-2space", "validate a chart-atlas model file");
  cmd_c2s->add_option("file", c2s_args.file, "model file")->required();
  cmd_c2s->add_flag("--strict", c2s_args.strict,
                    "also require the split component maps to be continuous");
  cmd_c2s->add_flag("--strict-relations", c2s_args.strict_relations,
                    "reject rel sets that are not transitively closed");
  add_common(cmd_c2s, c2s_args.common);

  CLI::App* cmd_c2m = app.add_subcommand("check-2map", "check a point map between two models");
  cmd_c2m->add_option("file", c2m_args.file, "2map file")->required();
  cmd_c2m->add_flag("--strict", c2m_args.strict,
                    "also require the split component maps to be continuous");
  cmd_c2m->add_flag("--strict-relations", c2m_args.strict_relations,
                    "reject rel sets that are not transitively closed");
  add_common(cmd_c2m, c2m_args.common);

  struct {
    std::string first;
    std::string second;
    bool strict_relations = false;
    Common common;
  } prod_args;
  CLI::App* cmd_2product =
      app.add_subcommand("2product", "combine two valid models into their product model");
  cmd_2product->add_option("first", prod_args.first, "first model file")->required();
  cmd_2product->add_option("second", prod_args.second, "second model file")->required();
  cmd_2product->add_flag("--strict-relations", prod_args.strict_relations,
                         "reject rel sets that are not transitively closed");
  add_common(cmd_2product, prod_args.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(cmd_enumerate)) {
      std::vector<fintop::FiniteSpace> spaces = fintop::enumerate_preorders(enum_args.points);
      std::vector<fintop::NamedSpace> listed;
      for (std::size_t i = 0; i < spaces.size(); ++i) {
        if (enum_args.distinct) {
          bool duplicate = false;
          for (const fintop::NamedSpace& seen : listed)
            if (fintop::homeomorphic(seen.space, spaces[i])) {
              duplicate = true;
              break;
            }
          if (duplicate) continue;
        }
        listed.push_back({"S" + std::to_string(i), spaces[i]});
      }
      std::string out =
          enum_args.common.format == "structured"
              ? fintop::render_structured(fintop::enumerate_json(
                    enum_args.points, listed, enum_args.distinct, spaces.size()))
              : fintop::emit_space_file({listed, {}});
      write_output(out, enum_args.common.output);
      return 0;
    }

    if (app.got_subcommand(cmd_analyze)) {
      fintop::SpaceFile f =
          fintop::load_space_file(analyze_args.file, {analyze_args.strict_relations});
      if (analyze_args.emit) {
        write_output(fintop::emit_space_file(f), analyze_args.common.output);
        return 0;
      }
      fintop::AnalysisInput in = fintop::to_analysis_input(f);
      fintop::ProductSpace ps(in.x.space, in.y.space);
      fintop::PointMask c = fintop::make_subset(ps, in.subset.pairs);
      fintop::TheoremVerdict v = fintop::evaluate_subset(ps, c);
      std::string out =
          analyze_args.common.format == "structured"
              ? fintop::render_structured(fintop::analyze_json(in.x, in.y, in.subset.name, ps, c, v))
              : fintop::analyze_text(in.x, in.y, in.subset.name, ps, c, v);
      write_output(out, analyze_args.common.output);
      return v.hypotheses_hold() && !v.conclusion_holds ? 1 : 0;
    }

    if (app.got_subcommand(cmd_verify) || app.got_subcommand(cmd_search)) {
      const bool search = app.got_subcommand(cmd_search);
      SweepCli& args = search ? search_args : verify_args;
      fintop::SweepConfig cfg = finish_sweep_config(
          args, search ? fintop::SweepMode::search : fintop::SweepMode::verify);
      fintop::SweepReport r = fintop::run_sweep(cfg);
      const std::string command = search ? "search" : "verify";
      std::string out = args.common.format == "structured"
                            ? fintop::render_structured(fintop::sweep_report_json(r, command))
                            : fintop::sweep_report_text(r, command);
      write_output(out, args.common.output);
      return r.ok() ? 0 : 1;
    }

    if (app.got_subcommand(cmd_fences)) {
      fintop::SweepConfig cfg = finish_sweep_config(fences_args, fintop::SweepMode::verify);
      fintop::SweepReport r = fintop::fence_sweep(cfg);
      std::string out = fences_args.common.format == "structured"
                            ? fintop::render_structured(fintop::sweep_report_json(r, "fences"))
                            : fintop::sweep_report_text(r, "fences");
      write_output(out, fences_args.common.output);
      return r.ok() ? 0 : 1;
    }

    if (app.got_subcommand(cmd_c2s)) {
      fintop::TwoSpace model = fintop::load_two_space(c2s_args.file, {c2s_args.strict_relations});
      fintop::TwoSpaceReport r = fintop::validate_two_space(model);
      std::string out =
          c2s_args.common.format == "structured"
              ? fintop::render_structured(fintop::check_two_space_json(model, r, c2s_args.strict))
              : fintop::check_two_space_text(model, r, c2s_args.strict);
      write_output(out, c2s_args.common.output);
      bool pass = c2s_args.strict ? (r.valid && r.strict_valid) : r.valid;
      return pass ? 0 : 1;
    }

    if (app.got_subcommand(cmd_c2m)) {
      fintop::TwoMapFile mf = fintop::load_two_map(c2m_args.file, {c2m_args.strict_relations});
      if (fintop::TwoSpaceReport vr = fintop::validate_two_space(mf.source); !vr.valid)
        throw std::invalid_argument("source model is not a valid 2-space: " + vr.message);
      if (fintop::TwoSpaceReport vr = fintop::validate_two_space(mf.target); !vr.valid)
        throw std::invalid_argument("target model is not a valid 2-space: " + vr.message);
      fintop::TwoMapReport r = fintop::check_two_map(mf.source, mf.target, mf.h);
      std::string out =
          c2m_args.common.format == "structured"
              ? fintop::render_structured(fintop::check_two_map_json(mf, r, c2m_args.strict))
              : fintop::check_two_map_text(mf, r, c2m_args.strict);
      write_output(out, c2m_args.common.output);
      bool pass = c2m_args.strict ? (r.ok && r.strict_ok) : r.ok;
      return pass ? 0 : 1;
    }

    if (app.got_subcommand(cmd_2product)) {
      fintop::TwoSpace first = fintop::load_two_space(prod_args.first, {prod_args.strict_relations});
      fintop::TwoSpace second =
          fintop::load_two_space(prod_args.second, {prod_args.strict_relations});
      fintop::TwoSpace result = fintop::two_product(first, second);
      std::string out = prod_args.common.format == "structured"
                            ? fintop::render_structured(fintop::two_product_json(result))
                            : fintop::emit_two_space(result);
      write_output(out, prod_args.common.output);
      return 0;
    }
  } catch (const fintop::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fintop::TheoremViolation& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
