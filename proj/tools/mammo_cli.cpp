// mammo: command-line front end for the detection pipeline.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mammo/config.hpp"
#include "mammo/mias.hpp"
#include "mammo/pgm.hpp"
#include "mammo/phantom.hpp"
#include "mammo/pipeline.hpp"
#include "mammo/svm_io.hpp"

namespace fs = std::filesystem;
using namespace mammo;

namespace {

std::string read_text(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  return {bytes.begin(), bytes.end()};
}

void write_text(const std::string& path, const std::string& text) {
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

PipelineConfig load_config(const std::string& path) {
  PipelineConfig cfg = path.empty() ? PipelineConfig{} : parse_config(read_text(path));
  cfg.validate();
  std::cerr << "config: " << to_json(cfg).dump() << "\n";
  return cfg;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void log_line(const std::string& s) { std::cerr << s << "\n"; }

std::vector<ImageCase> cases_from(const std::string& images_dir,
                                  const std::map<std::string, std::vector<MiasRecord>>& by_ref,
                                  const std::vector<std::string>& refs) {
  std::vector<ImageCase> cases;
  for (const auto& ref : refs) {
    const std::string path = (fs::path(images_dir) / (ref + ".pgm")).string();
    cases.push_back({ref, by_ref.at(ref), [path] { return read_pgm_file(path); }});
  }
  return cases;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mammogram mass detection pipeline"};
  app.require_subcommand(1);

  std::string in, out, config_path, out_mask, out_csv, images, info, model_path, overlay, report, spec;

  auto* enh = app.add_subcommand("enhance", "enhance a PGM image");
  enh->add_option("input", in, "input PGM")->required();
  enh->add_option("output", out, "output PGM")->required();
  enh->add_option("--config", config_path, "config file");

  auto* seg = app.add_subcommand("segment", "enhance and segment a PGM image");
  seg->add_option("input", in, "input PGM")->required();
  seg->add_option("--out-mask", out_mask, "mask PGM (0/255)");
  seg->add_option("--out-csv", out_csv, "region table");
  seg->add_option("--config", config_path, "config file");

  auto* feat = app.add_subcommand("features", "export region features as CSV");
  feat->add_option("input", in, "input PGM")->required();
  feat->add_option("--out", out, "feature CSV")->required();
  feat->add_option("--config", config_path, "config file");

  auto* train = app.add_subcommand("train", "train the region classifier");
  train->add_option("--images", images, "directory of <ref>.pgm")->required();
  train->add_option("--info", info, "ground-truth info file")->required();
  train->add_option("--out", out, "model file")->required();
  train->add_option("--config", config_path, "config file");

  auto* pred = app.add_subcommand("predict", "classify the regions of one image");
  pred->add_option("input", in, "input PGM")->required();
  pred->add_option("--model", model_path, "model file")->required();
  pred->add_option("--overlay", overlay, "overlay PGM");
  pred->add_option("--config", config_path, "config file");

  auto* eval = app.add_subcommand("evaluate", "lesion-level evaluation on the test split");
  eval->add_option("--images", images, "directory of <ref>.pgm")->required();
  eval->add_option("--info", info, "ground-truth info file")->required();
  eval->add_option("--model", model_path, "model file")->required();
  eval->add_option("--report", report, "report file")->required();
  eval->add_option("--config", config_path, "config file");

  auto* ph = app.add_subcommand("phantom", "generate a phantom corpus");
  ph->add_option("--spec", spec, "phantom spec file")->required();
  ph->add_option("--out-dir", out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (enh->parsed()) {
      const auto cfg = load_config(config_path);
      write_pgm_file(out, enhance(read_pgm_file(in), cfg.enhance));
    } else if (seg->parsed()) {
      const auto cfg = load_config(config_path);
      const auto res = segment_detailed(enhance(read_pgm_file(in), cfg.enhance), cfg.segment);
      if (!out_mask.empty()) write_pgm_file(out_mask, mask_to_image(res.mask));
      std::string csv = "region,label,area,centroid_row,centroid_col,min_row,min_col,max_row,max_col\n";
      for (std::size_t i = 0; i < res.regions.size(); ++i) {
        const auto& r = res.regions[i];
        const auto m = central_moments(r);
        csv += std::to_string(i) + "," + std::to_string(r.label) + "," + std::to_string(r.area()) + "," +
               fmt(m.centroid_row) + "," + fmt(m.centroid_col) + "," + std::to_string(r.bbox.min_row) + "," +
               std::to_string(r.bbox.min_col) + "," + std::to_string(r.bbox.max_row) + "," +
               std::to_string(r.bbox.max_col) + "\n";
      }
      if (!out_csv.empty()) write_text(out_csv, csv);
      else std::cout << csv;
      std::cerr << "regions: " << res.regions.size() << "\n";
    } else if (feat->parsed()) {
      const auto cfg = load_config(config_path);
      const auto columns = cfg.feature_columns();
      std::string csv;
      for (std::size_t i = 0; i < columns.size(); ++i) csv += (i ? "," : "") + columns[i];
      csv += "\n";
      for (const auto& c : analyze_image(read_pgm_file(in), cfg)) {
        const auto v = c.features.select(columns);
        for (std::size_t i = 0; i < v.size(); ++i) csv += (i ? "," : "") + fmt(v[i]);
        csv += "\n";
      }
      write_text(out, csv);
    } else if (train->parsed()) {
      const auto cfg = load_config(config_path);
      const auto by_ref = group_by_ref(parse_mias_info_file(read_text(info)));
      const auto split = split_refs(by_ref, cfg.split);
      const auto ts = build_training_set(cases_from(images, by_ref, split.train), cfg, log_line);
      std::cerr << "training images: " << split.train.size() << ", samples: " << ts.samples.size() << " (+"
                << ts.positives << " / -" << ts.negatives << ")\n";
      const auto model = train_model(ts, cfg);
      write_text(out, save_model(model));
      std::cout << "support_vectors " << model.support_vectors.size() << "\n";
      std::cout << "converged " << (model.converged ? "true" : "false") << "\n";
    } else if (pred->parsed()) {
      const auto cfg = load_config(config_path);
      const auto model = load_model(read_text(model_path));
      const auto img = read_pgm_file(in);
      const std::string ref = fs::path(in).stem().string();
      const auto dets = detect(model, img, cfg, ref);
      std::cout << "image_ref,region,score,predicted,centroid_row,centroid_col,min_row,min_col,max_row,max_col\n";
      for (const auto& d : dets) {
        std::cout << d.image_ref << "," << d.region_index << "," << fmt(d.score) << ","
                  << (d.tumor ? "tumor" : "normal") << "," << fmt(d.features.centroid_row()) << ","
                  << fmt(d.features.centroid_col()) << "," << d.bbox.min_row << "," << d.bbox.min_col << ","
                  << d.bbox.max_row << "," << d.bbox.max_col << "\n";
      }
      if (!overlay.empty()) write_pgm_file(overlay, render_overlay(img, dets, {}));
    } else if (eval->parsed()) {
      const auto cfg = load_config(config_path);
      const auto model = load_model(read_text(model_path));
      const auto by_ref = group_by_ref(parse_mias_info_file(read_text(info)));
      const auto split = split_refs(by_ref, cfg.split);
      const auto rep = evaluate(model, cases_from(images, by_ref, split.test), cfg, log_line);
      write_text(report, report_to_string(rep, cfg));
      std::cout << "sensitivity " << (rep.sensitivity ? fmt(*rep.sensitivity) : "undefined") << "\n";
      std::cout << "tp " << rep.tp << " fn " << rep.fn << " fp " << rep.fp << " tn " << rep.tn << "\n";
    } else if (ph->parsed()) {
      const auto specs = parse_phantom_specs(read_text(spec));
      fs::create_directories(out);
      std::string info_text;
      for (const auto& s : specs) {
        const auto p = generate_phantom(s);
        write_pgm_file((fs::path(out) / (s.ref + ".pgm")).string(), p.image);
        if (p.records.empty()) info_text += s.ref + " F NORM\n";
        for (const auto& r : p.records) info_text += format_mias_record(r) + "\n";
      }
      write_text((fs::path(out) / "info.txt").string(), info_text);
      std::cerr << "phantoms: " << specs.size() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
