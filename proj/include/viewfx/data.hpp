#pragma once

#include <map>
#include <string>
#include <vector>

#include "viewfx/image.hpp"
#include "viewfx/rng.hpp"

namespace viewfx {

/// One image with its annotations. Class, view, phi and subject ids are
/// dense 0-based indices; names live in the owning Dataset.
struct Sample {
  std::string path;     // relative to the dataset root
  int y = -1;           // class id; negative marks the label as withheld
  int v = 0;            // view id, ordered most-left to most-right
  int phi = 0;          // view-invariant capture id
  int subject = 0;
};

struct Dataset {
  std::string root;
  std::vector<Sample> samples;
  std::vector<std::string> class_names;   // index = class id
  std::vector<std::string> view_names;    // index = view id
  std::vector<std::string> subject_names; // index = subject id
  int phi_count = 0;
  bool complete = true;  // every phi group has exactly V members

  int num_classes() const { return static_cast<int>(class_names.size()); }
  int num_views() const { return static_cast<int>(view_names.size()); }
  int size() const { return static_cast<int>(samples.size()); }
  int frontal_view() const { return num_views() / 2; }

  /// Checks phi-consistency (shared label and subject within a group) and
  /// id ranges. Throws IntegrityError / InvalidInputError.
  void validate() const;

  /// Loads the raster for one sample (grayscale or RGB, [0,1] floats).
  Image load_image(int index) const;
};

/// Reads a CSV manifest (header `path,subject,label,view,instance_id`) with
/// its `classes.txt` and `views.txt` sidecars from the same directory.
Dataset load_manifest(const std::string& manifest_path);

struct SynthConfig {
  int classes = 8;    // <= 10 parametric glyph prototypes
  int views = 5;      // <= 7 azimuth steps, middle view frontal
  int subjects = 50;
  int image_size = 32;

  void validate() const;
};

/// Generates the synthetic multi-view glyph dataset under `out_dir`: PNG
/// images, manifest.csv, classes.txt, views.txt and meta.json. Every
/// (subject, class) capture yields one phi group of `views` images.
Dataset synth_generate(const SynthConfig& config, uint64_t seed, const std::string& out_dir);

/// Renders one synthetic image in memory (used by the generator and by
/// determinism tests).
Image synth_render(const SynthConfig& config, uint64_t seed, int subject, int cls, int view);

struct RawBatch {
  std::vector<int> sample_indices;  // N images
  std::vector<int> labels;          // per image
  std::vector<int> phis;
  std::vector<int> views;
};

/// Samples N images as N/2 phi groups x 2 distinct views, so every image has
/// a same-capture positive beyond its own augmentation sibling. N must be
/// even and >= 2; groups are drawn without replacement within one batch.
RawBatch sample_contrast_batch(const Dataset& dataset, int n_images, RngStream& rng);

struct Fold {
  std::vector<int> train_indices;
  std::vector<int> test_indices;
};

/// Subject-grouped k-fold split: all samples of one subject land on one side.
/// `by_subject = false` falls back to a per-image split (leaks identity; for
/// comparison only).
std::vector<Fold> split_folds(const Dataset& dataset, int k, uint64_t seed,
                              bool by_subject = true);

/// Keeps ceil(fraction * groups) labeled phi groups per class (stratified);
/// all other samples get y = -1. Sample membership is unchanged.
Dataset subsample_labels(const Dataset& dataset, double fraction, uint64_t seed);

}  // namespace viewfx
