#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "splitrt/errors.hpp"
#include "splitrt/harness.hpp"
#include "splitrt/procedural.hpp"

using namespace splitrt;

namespace {

// Flag values that override the config file when given.
struct Overrides {
  std::string mode, pass, out, reference, dump_field;
  std::optional<double>        multiplier, t_ao;
  std::optional<int>           spp;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App* app) {
    app->add_option("--mode", mode, "exact_only, combined or field_only");
    app->add_option("--pass", pass, "ao or shadow");
    app->add_option("--multiplier", multiplier, "split multiplier m");
    app->add_option("--spp", spp, "samples per pixel");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--t-ao", t_ao, "AO ray length in meters");
    app->add_option("--out", out, "output directory");
    app->add_option("--reference", reference, "reference image (PPM)");
    app->add_option("--dump-field", dump_field, "write the distance field to this prefix");
  }

  void apply(RunConfig& c) const {
    if (!mode.empty()) c.mode = parse_mode(mode);
    if (!pass.empty()) c.pass = parse_pass(pass);
    if (multiplier) c.multiplier = *multiplier;
    if (spp) c.spp = *spp;
    if (seed) c.seed = *seed;
    if (t_ao) c.t_ao = *t_ao;
    if (!out.empty()) c.output_dir = out;
    if (!reference.empty()) c.reference = reference;
  }
};

void print_stats(const WorkStats& s, const std::string& label) {
  std::cout << label << ": rays=" << s.rays << " triangle_tests=" << s.triangle_tests
            << " node_visits=" << s.bvh_node_visits << " march_steps=" << s.sphere_trace_steps
            << " work=" << s.work_score() << " time=" << s.wall_time << "s\n";
}

void write_default_config(const std::filesystem::path& dir, const std::string& name) {
  auto path = dir / (name + "_run.json");
  auto file = std::ofstream{path};
  if (!file) throw IoError("cannot write " + path.string());
  auto pass = name == "fin" ? "shadow" : "ao";
  auto t_ao = name == "hall" ? 100.0 : 10.0;
  file << "{\n  \"scene\": \"" << name << ".json\",\n  \"name\": \"" << name << "\",\n"
       << "  \"pass\": \"" << pass << "\",\n  \"mode\": \"combined\",\n  \"spp\": 16,\n"
       << "  \"seed\": 1,\n  \"t_ao\": " << t_ao << ",\n  \"split\": {\"multiplier\": 8},\n"
       << "  \"output_dir\": \"out\"\n}\n";
}

}  // namespace

int main(int argc, char** argv) {
  auto app = CLI::App{"Split ray queries between a BVH and cascaded distance fields"};
  app.require_subcommand(1);

  auto trace_config = std::string{};
  auto trace_over   = Overrides{};
  auto* trace       = app.add_subcommand("trace", "render one pass in one mode");
  trace->add_option("--config", trace_config, "run configuration (JSON)")->required();
  trace_over.add_to(trace);

  auto compare_config = std::string{};
  auto compare_over   = Overrides{};
  auto* cmp           = app.add_subcommand("compare", "render all three modes and tabulate");
  cmp->add_option("--config", compare_config, "run configuration (JSON)")->required();
  compare_over.add_to(cmp);

  auto scene_name = std::string{};
  auto scene_out  = std::string{};
  auto* gen       = app.add_subcommand("genscene", "write a procedural scene");
  gen->add_option("name", scene_name, "cornell, hall, fin or contact")->required();
  gen->add_option("--out", scene_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*trace) {
      auto config = load_config(trace_config);
      trace_over.apply(config);
      if (!trace_over.dump_field.empty()) {
        config.validate();
        auto engine = Engine{prepare_scene(config)};
        write_field_dump(engine.field(config.field_for(config.mode)), trace_over.dump_field);
      }
      auto result = run(config);
      print_stats(result.output.primary, "primary");
      print_stats(result.output.pass, pass_name(config.pass) + "/" + mode_name(config.mode));
      if (result.error)
        std::cout << "error: rmse=" << result.error->rmse << " mae=" << result.error->mae
                  << " max_abs=" << result.error->max_abs << '\n';
      for (auto& f : result.files) std::cout << "wrote " << f.string() << '\n';
    } else if (*cmp) {
      auto config = load_config(compare_config);
      compare_over.apply(config);
      for (auto& row : compare(config)) {
        print_stats(row.stats, mode_name(row.mode));
        std::cout << "  rmse=" << row.error.rmse << " mae=" << row.error.mae << '\n';
      }
      std::cout << "wrote " << (config.output_dir / (config.name + "_compare.csv")).string() << '\n';
    } else if (*gen) {
      auto scene = make_scene(scene_name);
      save_scene(scene, scene_out, scene_name);
      write_default_config(scene_out, scene_name);
      std::cout << "wrote " << (std::filesystem::path{scene_out} / (scene_name + ".json")).string()
                << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
