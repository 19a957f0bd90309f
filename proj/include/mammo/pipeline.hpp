#pragma once

// Enhance -> segment -> features -> SVM, plus ground-truth matching,
// lesion-level evaluation, train/test splitting and overlay rendering.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mammo/config.hpp"
#include "mammo/enhance.hpp"
#include "mammo/error.hpp"
#include "mammo/features.hpp"
#include "mammo/image.hpp"
#include "mammo/mias.hpp"
#include "mammo/segment.hpp"
#include "mammo/svm.hpp"

namespace mammo {

using LogFn = std::function<void(const std::string&)>;

/// One image plus its ground truth. Images are loaded on demand so a large
/// corpus never has to sit in memory at once.
struct ImageCase {
  std::string ref;
  std::vector<MiasRecord> records;
  std::function<GrayImage()> load;
};

/// A segmented region reduced to what classification and matching need.
struct Candidate {
  int region_index = 0;
  BoundingBox bbox;
  FeatureVector features;
};

struct ImageAnalysis {
  std::string ref;
  int height = 0;
  int width = 0;
  std::vector<Candidate> candidates;
  std::optional<std::string> error;  // set when a stage failed for this image
};

struct Lesion {
  double row = 0.0;
  double col = 0.0;
  double radius = 0.0;
};

inline bool match_centroid(double row, double col, ImagePoint center, double radius) {
  const double dr = row - center.row, dc = col - center.col;
  return dr * dr + dc * dc <= radius * radius;
}

/// True iff the region centroid lies within `radius` of `center` (inclusive).
inline bool match_region(const Region& region, ImagePoint center, double radius) {
  const MomentSet m = central_moments(region);
  return match_centroid(m.centroid_row, m.centroid_col, center, radius);
}

inline bool match_candidate(const Candidate& c, const Lesion& l) {
  return match_centroid(c.features.centroid_row(), c.features.centroid_col(), {l.row, l.col}, l.radius);
}

/// Lesions with a center and radius, in image coordinates.
inline std::vector<Lesion> located_lesions(const std::vector<MiasRecord>& records, int image_height) {
  std::vector<Lesion> out;
  for (const auto& r : records) {
    if (r.is_normal() || !r.has_location()) continue;
    const auto p = gt_to_image_coords(r, image_height);
    out.push_back({p.row, p.col, *r.radius});
  }
  return out;
}

inline std::size_t unlocated_count(const std::vector<MiasRecord>& records) {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const MiasRecord& r) {
    return !r.is_normal() && !r.has_location();
  }));
}

inline bool is_normal_image(const std::vector<MiasRecord>& records) {
  return std::all_of(records.begin(), records.end(), [](const MiasRecord& r) { return r.is_normal(); });
}

inline std::vector<Candidate> analyze_image(const GrayImage& img, const PipelineConfig& cfg) {
  const GrayImage enhanced = enhance(img, cfg.enhance);
  const auto regions = segment(enhanced, cfg.segment);
  std::vector<Candidate> out;
  out.reserve(regions.size());
  for (std::size_t i = 0; i < regions.size(); ++i) {
    out.push_back({static_cast<int>(i), regions[i].bbox, extract_features(regions[i])});
  }
  return out;
}

/// Runs the per-image stages, optionally on several threads. Results come
/// back in the order of `cases` regardless of scheduling.
inline std::vector<ImageAnalysis> analyze_cases(const std::vector<ImageCase>& cases, const PipelineConfig& cfg,
                                                const LogFn& log = {}) {
  std::vector<ImageAnalysis> out(cases.size());
  const auto work = [&](std::size_t i) {
    ImageAnalysis& a = out[i];
    a.ref = cases[i].ref;
    try {
      const GrayImage img = cases[i].load();
      a.height = img.height();
      a.width = img.width();
      a.candidates = analyze_image(img, cfg);
    } catch (const std::exception& e) {
      a.candidates.clear();
      a.error = e.what();
    }
  };
  unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cases.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < cases.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cases.size();) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  if (log) {
    for (const auto& a : out) {
      if (a.error) log("skipping " + a.ref + ": " + *a.error);
      else if (a.candidates.empty()) log(a.ref + ": no regions");
    }
  }
  return out;
}

struct TrainingSet {
  std::vector<Sample> samples;
  std::vector<std::string> columns;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::vector<std::string> skipped;  // refs that failed in some stage
};

/// Labels each region +1 when it matches a located lesion of its image, else -1.
inline TrainingSet training_set_from(const std::vector<ImageAnalysis>& analyses, const std::vector<ImageCase>& cases,
                                     const std::vector<std::string>& columns) {
  TrainingSet ts;
  ts.columns = columns;
  for (std::size_t i = 0; i < analyses.size(); ++i) {
    const auto& a = analyses[i];
    if (a.error) {
      ts.skipped.push_back(a.ref);
      continue;
    }
    const auto lesions = located_lesions(cases[i].records, a.height);
    for (const auto& c : a.candidates) {
      const bool hit = std::any_of(lesions.begin(), lesions.end(), [&](const Lesion& l) { return match_candidate(c, l); });
      ts.samples.push_back({c.features.select(columns), hit ? 1 : -1});
      ++(hit ? ts.positives : ts.negatives);
    }
  }
  return ts;
}

inline TrainingSet build_training_set(const std::vector<ImageCase>& cases, const PipelineConfig& cfg,
                                      const LogFn& log = {}) {
  cfg.validate();
  return training_set_from(analyze_cases(cases, cfg, log), cases, cfg.feature_columns());
}

inline SvmModel train_model(const TrainingSet& ts, const PipelineConfig& cfg) {
  return train_svm(ts.samples, cfg.kernel, cfg.train, ts.columns);
}

struct Detection {
  std::string image_ref;
  int region_index = 0;
  FeatureVector features;
  BoundingBox bbox;
  double score = 0.0;
  bool tumor = false;  // score >= 0
};

inline std::vector<std::string> model_columns(const SvmModel& model) {
  return model.feature_names.empty() ? feature_names() : model.feature_names;
}

inline std::vector<Detection> classify(const SvmModel& model, const std::string& ref,
                                       const std::vector<Candidate>& candidates) {
  const auto columns = model_columns(model);
  std::vector<Detection> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    const double score = decision_value(model, c.features.select(columns));
    out.push_back({ref, c.region_index, c.features, c.bbox, score, score >= 0.0});
  }
  return out;
}

inline std::vector<Detection> detect(const SvmModel& model, const GrayImage& img, const PipelineConfig& cfg,
                                     const std::string& ref) {
  return classify(model, ref, analyze_image(img, cfg));
}

struct ImageEval {
  std::string ref;
  std::size_t candidates = 0;
  std::size_t detections = 0;  // tumor-predicted regions
  std::size_t lesions = 0;
  std::size_t matches = 0;  // lesions hit by a tumor-predicted region
  std::size_t false_positives = 0;
  std::optional<std::string> error;
};

struct EvalReport {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::size_t lesions = 0;            // located lesions, == tp + fn
  std::size_t unlocated_lesions = 0;  // abnormal records without a center
  std::size_t images = 0;
  std::size_t failed_images = 0;
  std::optional<double> sensitivity;  // empty when there are no lesions
  std::vector<ImageEval> per_image;
};

inline EvalReport evaluate_analyses(const SvmModel& model, const std::vector<ImageAnalysis>& analyses,
                                    const std::vector<ImageCase>& cases) {
  EvalReport rep;
  for (std::size_t i = 0; i < analyses.size(); ++i) {
    const auto& a = analyses[i];
    const auto& recs = cases[i].records;
    ImageEval ie;
    ie.ref = a.ref;
    ie.error = a.error;
    ++rep.images;
    rep.unlocated_lesions += unlocated_count(recs);
    if (a.error) {
      // The height is unknown, so lesions are counted without locating them.
      ie.lesions = static_cast<std::size_t>(std::count_if(recs.begin(), recs.end(), [](const MiasRecord& r) {
        return !r.is_normal() && r.has_location();
      }));
      rep.lesions += ie.lesions;
      rep.fn += ie.lesions;
      ++rep.failed_images;
      rep.per_image.push_back(ie);
      continue;
    }
    const auto lesions = located_lesions(recs, a.height);
    const auto dets = classify(model, a.ref, a.candidates);
    ie.candidates = dets.size();
    ie.lesions = lesions.size();
    std::vector<bool> hit(lesions.size(), false);
    for (std::size_t d = 0; d < dets.size(); ++d) {
      if (!dets[d].tumor) continue;
      ++ie.detections;
      bool matched = false;
      for (std::size_t l = 0; l < lesions.size(); ++l) {
        if (match_candidate(a.candidates[d], lesions[l])) {
          hit[l] = true;
          matched = true;
        }
      }
      if (!matched) ++ie.false_positives;
    }
    ie.matches = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), true));
    rep.tp += ie.matches;
    rep.fn += ie.lesions - ie.matches;
    rep.fp += ie.false_positives;
    rep.lesions += ie.lesions;
    if (is_normal_image(recs) && ie.detections == 0) ++rep.tn;
    rep.per_image.push_back(ie);
  }
  if (rep.tp + rep.fn > 0) rep.sensitivity = static_cast<double>(rep.tp) / static_cast<double>(rep.tp + rep.fn);
  return rep;
}

inline EvalReport evaluate(const SvmModel& model, const std::vector<ImageCase>& cases, const PipelineConfig& cfg,
                           const LogFn& log = {}) {
  cfg.validate();
  return evaluate_analyses(model, analyze_cases(cases, cfg, log), cases);
}

/// Report document with a fixed key order; the config used is embedded.
inline std::string report_to_string(const EvalReport& r, const PipelineConfig& cfg) {
  Json j;
  j["sensitivity"] = r.sensitivity ? Json(*r.sensitivity) : Json(nullptr);
  j["sensitivity_defined"] = r.sensitivity.has_value();
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["tn"] = r.tn;
  j["lesions"] = r.lesions;
  j["unlocated_lesions"] = r.unlocated_lesions;
  j["images"] = r.images;
  j["failed_images"] = r.failed_images;
  Json per = Json::array();
  for (const auto& ie : r.per_image) {
    Json e = {{"ref", ie.ref},
              {"candidates", ie.candidates},
              {"detections", ie.detections},
              {"lesions", ie.lesions},
              {"matches", ie.matches},
              {"false_positives", ie.false_positives}};
    if (ie.error) e["error"] = *ie.error;
    per.push_back(std::move(e));
  }
  j["per_image"] = std::move(per);
  j["config"] = to_json(cfg);
  return j.dump(2) + "\n";
}

struct SplitResult {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

/// Deterministic stratified split over image refs. Strata: images with a
/// located lesion, abnormal images without one, normal images. Within each
/// stratum refs are sorted; "halves" alternates train/test starting with
/// train, "kfold" assigns position i to fold i mod k and tests on `fold`.
inline SplitResult split_refs(const std::map<std::string, std::vector<MiasRecord>>& by_ref, const SplitConfig& s) {
  s.validate();
  SplitResult out;
  std::vector<std::string> strata[3];
  for (const auto& [ref, recs] : by_ref) {  // std::map iterates in sorted order
    const bool located = std::any_of(recs.begin(), recs.end(), [](const MiasRecord& r) {
      return !r.is_normal() && r.has_location();
    });
    strata[located ? 0 : is_normal_image(recs) ? 2 : 1].push_back(ref);
  }
  for (const auto& refs : strata) {
    for (std::size_t i = 0; i < refs.size(); ++i) {
      bool test = false;
      switch (s.mode) {
        case SplitMode::halves: test = i % 2 == 1; break;
        case SplitMode::kfold: test = static_cast<int>(i % static_cast<std::size_t>(s.k)) == s.fold; break;
        case SplitMode::all:
          out.train.push_back(refs[i]);
          test = true;
          break;
      }
      if (test) out.test.push_back(refs[i]);
      else if (s.mode != SplitMode::all) out.train.push_back(refs[i]);
    }
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

namespace detail {

inline void put(GrayImage& img, int r, int c, double v) {
  if (r >= 0 && r < img.height() && c >= 0 && c < img.width()) img(r, c) = v;
}

// Midpoint circle outline.
inline void draw_circle(GrayImage& img, int cr, int cc, int radius, double v) {
  if (radius <= 0) {
    put(img, cr, cc, v);
    return;
  }
  int x = radius, y = 0, err = 1 - radius;
  while (x >= y) {
    for (const auto& [dr, dc] : {std::pair{y, x}, {x, y}, {x, -y}, {y, -x}, {-y, -x}, {-x, -y}, {-x, y}, {-y, x}}) {
      put(img, cr + dr, cc + dc, v);
    }
    ++y;
    if (err < 0) {
      err += 2 * y + 1;
    } else {
      --x;
      err += 2 * (y - x) + 1;
    }
  }
}

inline void draw_box(GrayImage& img, const BoundingBox& b, double v) {
  for (int c = b.min_col; c <= b.max_col; ++c) {
    put(img, b.min_row, c, v);
    put(img, b.max_row, c, v);
  }
  for (int r = b.min_row; r <= b.max_row; ++r) {
    put(img, r, b.min_col, v);
    put(img, r, b.max_col, v);
  }
}

}  // namespace detail

/// Ground-truth circles at 128, then tumor-predicted bounding boxes at 255.
inline GrayImage render_overlay(const GrayImage& img, const std::vector<Detection>& detections,
                                const std::vector<MiasRecord>& records) {
  GrayImage out = img;
  for (const auto& l : located_lesions(records, img.height())) {
    detail::draw_circle(out, static_cast<int>(std::lround(l.row)), static_cast<int>(std::lround(l.col)),
                        static_cast<int>(std::lround(l.radius)), 128.0);
  }
  for (const auto& d : detections) {
    if (d.tumor) detail::draw_box(out, d.bbox, 255.0);
  }
  return out;
}

}  // namespace mammo
