#pragma once

// JSON serialization for the pipeline configuration and the phantom specs.
// Unknown keys are rejected so a typo cannot silently fall back to a default.
//
// {
//   "enhance":  {"gaussian_sigma": 1.5, "se_radius": 45, "stretch_low": 1, "stretch_high": 99,
//                "dwt_levels": 2, "detail_policy": "zero_level1", "soft_threshold": 0},
//   "segment":  {"threshold_mode": "otsu", "fixed_threshold": 128, "min_area": 50,
//                "mask_sigma": 1.5, "connectivity": 8},
//   "features": ["area", "centroid", ...],           // [] or absent: all columns
//   "svm":      {"kernel": "rbf", "gamma": null, "sigma": null, "coef": 1, "degree": 3,
//                "c": 1, "tol": 0.001, "max_passes": 0, "eps": 1e-8},
//   "split":    {"mode": "halves", "k": 5, "fold": 0},
//   "seed": 1,
//   "threads": 1
// }

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "mammo/enhance.hpp"
#include "mammo/error.hpp"
#include "mammo/features.hpp"
#include "mammo/phantom.hpp"
#include "mammo/segment.hpp"
#include "mammo/svm.hpp"

namespace mammo {

using Json = nlohmann::ordered_json;

enum class SplitMode { halves, kfold, all };

struct SplitConfig {
  SplitMode mode = SplitMode::halves;
  int k = 5;
  int fold = 0;

  void validate() const {
    if (mode == SplitMode::kfold && (k < 2 || fold < 0 || fold >= k)) {
      throw InvalidConfig("split: k-fold needs k >= 2 and 0 <= fold < k");
    }
  }
  friend bool operator==(const SplitConfig&, const SplitConfig&) = default;
};

struct PipelineConfig {
  EnhanceConfig enhance;
  SegmentConfig segment;
  std::vector<std::string> features;  // property or column names; empty = all
  KernelSpec kernel;
  TrainConfig train;
  SplitConfig split;
  std::uint64_t seed = 1;
  int threads = 1;  // per-image workers; 0 = hardware concurrency

  void validate() const {
    enhance.validate();
    segment.validate();
    (void)select_feature_columns(features);
    kernel.validate();
    train.validate();
    split.validate();
    if (threads < 0) throw InvalidConfig("threads must be >= 0");
  }

  std::vector<std::string> feature_columns() const { return select_feature_columns(features); }

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

namespace detail {

class JsonObject {
 public:
  JsonObject(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw InvalidConfig(where_ + ": expected an object");
  }
  ~JsonObject() = default;

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw InvalidConfig(where_ + "." + key + ": wrong type");
    }
  }

  void get_optional(const char* key, std::optional<double>& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    if (!it->is_number()) throw InvalidConfig(where_ + "." + key + ": expected a number");
    out = it->get<double>();
  }

  const Json* child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw InvalidConfig(where_ + ": unknown key '" + k + "'");
    }
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

inline Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace detail

inline Json to_json(const PipelineConfig& c) {
  Json j;
  const auto* st = std::get_if<SoftThreshold>(&c.enhance.detail_policy);
  j["enhance"] = {{"gaussian_sigma", c.enhance.gaussian_sigma},
                  {"se_radius", c.enhance.se_radius},
                  {"stretch_low", c.enhance.stretch_low},
                  {"stretch_high", c.enhance.stretch_high},
                  {"dwt_levels", c.enhance.dwt_levels},
                  {"detail_policy", policy_name(c.enhance.detail_policy)},
                  {"soft_threshold", st ? st->t : 0.0}};
  j["segment"] = {{"threshold_mode", c.segment.threshold_mode == ThresholdMode::otsu ? "otsu" : "fixed"},
                  {"fixed_threshold", c.segment.fixed_threshold},
                  {"min_area", c.segment.min_area},
                  {"mask_sigma", c.segment.mask_sigma},
                  {"connectivity", c.segment.connectivity}};
  j["features"] = c.features;
  j["svm"] = {{"kernel", kernel_name(c.kernel.kind)},
              {"gamma", detail::optional_json(c.kernel.gamma)},
              {"sigma", detail::optional_json(c.kernel.sigma)},
              {"coef", c.kernel.coef},
              {"degree", c.kernel.degree},
              {"c", c.train.c},
              {"tol", c.train.tol},
              {"max_passes", c.train.max_passes},
              {"eps", c.train.eps}};
  const char* mode = c.split.mode == SplitMode::halves ? "halves" : c.split.mode == SplitMode::kfold ? "kfold" : "all";
  j["split"] = {{"mode", mode}, {"k", c.split.k}, {"fold", c.split.fold}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j;
}

inline PipelineConfig config_from_json(const Json& j) {
  PipelineConfig c;
  detail::JsonObject root(j, "config");
  if (const Json* e = root.child("enhance")) {
    detail::JsonObject o(*e, "enhance");
    o.get("gaussian_sigma", c.enhance.gaussian_sigma);
    o.get("se_radius", c.enhance.se_radius);
    o.get("stretch_low", c.enhance.stretch_low);
    o.get("stretch_high", c.enhance.stretch_high);
    o.get("dwt_levels", c.enhance.dwt_levels);
    std::string policy = policy_name(c.enhance.detail_policy);
    double t = 0.0;
    o.get("detail_policy", policy);
    o.get("soft_threshold", t);
    if (policy == "zero_level1") c.enhance.detail_policy = ZeroLevel1{};
    else if (policy == "zero_all") c.enhance.detail_policy = ZeroAll{};
    else if (policy == "keep_all") c.enhance.detail_policy = KeepAll{};
    else if (policy == "soft_threshold") c.enhance.detail_policy = SoftThreshold{t};
    else throw InvalidConfig("enhance.detail_policy: unknown policy '" + policy + "'");
    o.finish();
  }
  if (const Json* s = root.child("segment")) {
    detail::JsonObject o(*s, "segment");
    std::string mode = "otsu";
    o.get("threshold_mode", mode);
    if (mode == "otsu") c.segment.threshold_mode = ThresholdMode::otsu;
    else if (mode == "fixed") c.segment.threshold_mode = ThresholdMode::fixed;
    else throw InvalidConfig("segment.threshold_mode: expected otsu or fixed");
    o.get("fixed_threshold", c.segment.fixed_threshold);
    o.get("min_area", c.segment.min_area);
    o.get("mask_sigma", c.segment.mask_sigma);
    o.get("connectivity", c.segment.connectivity);
    o.finish();
  }
  if (const Json* f = root.child("features")) {
    try {
      c.features = f->get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception&) {
      throw InvalidConfig("features: expected a list of names");
    }
  }
  if (const Json* s = root.child("svm")) {
    detail::JsonObject o(*s, "svm");
    std::string kernel = kernel_name(c.kernel.kind);
    o.get("kernel", kernel);
    try {
      c.kernel.kind = parse_kernel_kind(kernel);
    } catch (const InvalidKernel& e) {
      throw InvalidConfig(e.what());
    }
    o.get_optional("gamma", c.kernel.gamma);
    o.get_optional("sigma", c.kernel.sigma);
    o.get("coef", c.kernel.coef);
    o.get("degree", c.kernel.degree);
    o.get("c", c.train.c);
    o.get("tol", c.train.tol);
    o.get("max_passes", c.train.max_passes);
    o.get("eps", c.train.eps);
    o.finish();
  }
  if (const Json* s = root.child("split")) {
    detail::JsonObject o(*s, "split");
    std::string mode = "halves";
    o.get("mode", mode);
    if (mode == "halves") c.split.mode = SplitMode::halves;
    else if (mode == "kfold") c.split.mode = SplitMode::kfold;
    else if (mode == "all") c.split.mode = SplitMode::all;
    else throw InvalidConfig("split.mode: expected halves, kfold or all");
    o.get("k", c.split.k);
    o.get("fold", c.split.fold);
    o.finish();
  }
  root.get("seed", c.seed);
  root.get("threads", c.threads);
  root.finish();
  try {
    c.validate();
  } catch (const InvalidKernel& e) {
    throw InvalidConfig(e.what());
  }
  return c;
}

inline std::string config_to_string(const PipelineConfig& c) { return to_json(c).dump(2) + "\n"; }

inline PipelineConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidConfig(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

// Phantom spec files: {"corpus": {...}} draws a random corpus,
// {"phantoms": [{...}, ...]} lists explicit phantoms.

inline Json to_json(const PhantomSpec& p) {
  Json blobs = Json::array(), ducts = Json::array();
  for (const auto& b : p.blobs) {
    blobs.push_back({{"row", b.row}, {"col", b.col}, {"radius", b.radius}, {"amplitude", b.amplitude}});
  }
  for (const auto& d : p.ducts) {
    ducts.push_back({{"row0", d.row0}, {"col0", d.col0}, {"row1", d.row1}, {"col1", d.col1},
                     {"width", d.width}, {"amplitude", d.amplitude}});
  }
  return {{"ref", p.ref}, {"height", p.height}, {"width", p.width}, {"background_level", p.background_level},
          {"noise_std", p.noise_std}, {"seed", p.seed}, {"blobs", blobs}, {"ducts", ducts}};
}

inline PhantomSpec phantom_from_json(const Json& j) {
  PhantomSpec p;
  detail::JsonObject o(j, "phantom");
  o.get("ref", p.ref);
  o.get("height", p.height);
  o.get("width", p.width);
  o.get("background_level", p.background_level);
  o.get("noise_std", p.noise_std);
  o.get("seed", p.seed);
  if (const Json* bl = o.child("blobs")) {
    if (!bl->is_array()) throw InvalidConfig("phantom.blobs: expected a list");
    for (const auto& b : *bl) {
      PhantomBlob blob;
      detail::JsonObject ob(b, "phantom.blobs[]");
      ob.get("row", blob.row);
      ob.get("col", blob.col);
      ob.get("radius", blob.radius);
      ob.get("amplitude", blob.amplitude);
      ob.finish();
      p.blobs.push_back(blob);
    }
  }
  if (const Json* dl = o.child("ducts")) {
    if (!dl->is_array()) throw InvalidConfig("phantom.ducts: expected a list");
    for (const auto& d : *dl) {
      PhantomDuct duct;
      detail::JsonObject od(d, "phantom.ducts[]");
      od.get("row0", duct.row0);
      od.get("col0", duct.col0);
      od.get("row1", duct.row1);
      od.get("col1", duct.col1);
      od.get("width", duct.width);
      od.get("amplitude", duct.amplitude);
      od.finish();
      p.ducts.push_back(duct);
    }
  }
  o.finish();
  p.validate();
  return p;
}

inline Json to_json(const CorpusSpec& c) {
  return {{"count", c.count},
          {"seed", c.seed},
          {"ref_prefix", c.ref_prefix},
          {"height", c.height},
          {"width", c.width},
          {"background_level", c.background_level},
          {"noise_std", c.noise_std},
          {"normal_fraction", c.normal_fraction},
          {"blob_radius_min", c.blob_radius_min},
          {"blob_radius_max", c.blob_radius_max},
          {"amplitude_min", c.amplitude_min},
          {"amplitude_max", c.amplitude_max},
          {"duct_count_min", c.duct_count_min},
          {"duct_count_max", c.duct_count_max},
          {"duct_length_min", c.duct_length_min},
          {"duct_length_max", c.duct_length_max},
          {"duct_width_min", c.duct_width_min},
          {"duct_width_max", c.duct_width_max},
          {"duct_amplitude_min", c.duct_amplitude_min},
          {"duct_amplitude_max", c.duct_amplitude_max},
          {"border_margin", c.border_margin},
          {"duct_clearance", c.duct_clearance}};
}

inline CorpusSpec corpus_from_json(const Json& j) {
  CorpusSpec c;
  detail::JsonObject o(j, "corpus");
  o.get("count", c.count);
  o.get("seed", c.seed);
  o.get("ref_prefix", c.ref_prefix);
  o.get("height", c.height);
  o.get("width", c.width);
  o.get("background_level", c.background_level);
  o.get("noise_std", c.noise_std);
  o.get("normal_fraction", c.normal_fraction);
  o.get("blob_radius_min", c.blob_radius_min);
  o.get("blob_radius_max", c.blob_radius_max);
  o.get("amplitude_min", c.amplitude_min);
  o.get("amplitude_max", c.amplitude_max);
  o.get("duct_count_min", c.duct_count_min);
  o.get("duct_count_max", c.duct_count_max);
  o.get("duct_length_min", c.duct_length_min);
  o.get("duct_length_max", c.duct_length_max);
  o.get("duct_width_min", c.duct_width_min);
  o.get("duct_width_max", c.duct_width_max);
  o.get("duct_amplitude_min", c.duct_amplitude_min);
  o.get("duct_amplitude_max", c.duct_amplitude_max);
  o.get("border_margin", c.border_margin);
  o.get("duct_clearance", c.duct_clearance);
  o.finish();
  c.validate();
  return c;
}

/// Reads a phantom spec document into a list of phantom specs.
inline std::vector<PhantomSpec> parse_phantom_specs(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidConfig(std::string("phantom spec is not valid JSON: ") + e.what());
  }
  detail::JsonObject root(j, "spec");
  std::vector<PhantomSpec> out;
  if (const Json* c = root.child("corpus")) out = make_corpus(corpus_from_json(*c));
  if (const Json* list = root.child("phantoms")) {
    if (!list->is_array()) throw InvalidConfig("phantoms: expected a list");
    for (const auto& p : *list) out.push_back(phantom_from_json(p));
  }
  root.finish();
  return out;
}

}  // namespace mammo
