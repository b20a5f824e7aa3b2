#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "viewfx/data.hpp"

using namespace viewfx;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

SynthConfig tiny_config() {
  SynthConfig cfg;
  cfg.classes = 4;
  cfg.views = 5;
  cfg.subjects = 6;
  cfg.image_size = 32;
  return cfg;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

}  // namespace

TEST_CASE("synthetic generator produces the counted dataset layout") {
  TempDir dir("viewfx_synth_test");
  const SynthConfig cfg = tiny_config();
  const Dataset ds = synth_generate(cfg, 7, dir.path.string());

  CHECK(ds.size() == 4 * 5 * 6);
  CHECK(ds.num_classes() == 4);
  CHECK(ds.num_views() == 5);
  CHECK(ds.phi_count == 24);
  CHECK(ds.complete);
  CHECK(ds.view_names == std::vector<std::string>{"FL", "HL", "S", "HR", "FR"});
  CHECK(ds.frontal_view() == 2);
  CHECK(fs::exists(dir.path / "manifest.csv"));
  CHECK(fs::exists(dir.path / "classes.txt"));
  CHECK(fs::exists(dir.path / "views.txt"));
  CHECK(fs::exists(dir.path / "meta.json"));

  // Every phi group spans exactly V distinct views with one label.
  std::map<int, std::set<int>> views_of_phi;
  for (const Sample& s : ds.samples) views_of_phi[s.phi].insert(s.v);
  for (const auto& [phi, views] : views_of_phi) CHECK(views.size() == 5);

  // Images load as 32x32 grayscale with in-range pixels.
  const Image img = ds.load_image(0);
  CHECK(img.channels == 1);
  CHECK(img.height == 32);
  CHECK(img.width == 32);
}

TEST_CASE("generator is deterministic and seed-sensitive") {
  const SynthConfig cfg = tiny_config();
  const Image a = synth_render(cfg, 11, 2, 1, 3);
  const Image b = synth_render(cfg, 11, 2, 1, 3);
  CHECK(a.pixels == b.pixels);
  const Image c = synth_render(cfg, 12, 2, 1, 3);
  CHECK(a.pixels != c.pixels);
  const Image d = synth_render(cfg, 11, 2, 1, 2);
  CHECK(a.pixels != d.pixels);
}

TEST_CASE("manifest round-trip reproduces the generated dataset") {
  TempDir dir("viewfx_manifest_test");
  const SynthConfig cfg = tiny_config();
  const Dataset gen = synth_generate(cfg, 9, dir.path.string());
  const Dataset loaded = load_manifest((dir.path / "manifest.csv").string());

  REQUIRE(loaded.size() == gen.size());
  CHECK(loaded.num_classes() == gen.num_classes());
  CHECK(loaded.num_views() == gen.num_views());
  CHECK(loaded.phi_count == gen.phi_count);
  CHECK(loaded.complete);
  for (int i = 0; i < gen.size(); ++i) {
    CHECK(loaded.samples[i].path == gen.samples[i].path);
    CHECK(loaded.samples[i].y == gen.samples[i].y);
    CHECK(loaded.samples[i].v == gen.samples[i].v);
    CHECK(loaded.samples[i].phi == gen.samples[i].phi);
    CHECK(loaded.samples[i].subject == gen.samples[i].subject);
  }
}

TEST_CASE("manifest loader reports malformed input precisely") {
  TempDir dir("viewfx_badmanifest_test");
  write_file(dir.path / "classes.txt", "happy\nsad\n");
  write_file(dir.path / "views.txt", "L\nS\nR\n");

  SUBCASE("bad header") {
    write_file(dir.path / "manifest.csv", "path,subject,label\nx.png,s1,happy\n");
    CHECK_THROWS_AS(load_manifest((dir.path / "manifest.csv").string()), ParseError);
  }
  SUBCASE("wrong field count") {
    write_file(dir.path / "manifest.csv",
               "path,subject,label,view,instance_id\nx.png,s1,happy,L\n");
    CHECK_THROWS_WITH_AS(load_manifest((dir.path / "manifest.csv").string()),
                         doctest::Contains("line 2"), ParseError);
  }
  SUBCASE("unknown label") {
    write_file(dir.path / "manifest.csv",
               "path,subject,label,view,instance_id\nx.png,s1,angry,L,i1\n");
    CHECK_THROWS_WITH_AS(load_manifest((dir.path / "manifest.csv").string()),
                         doctest::Contains("unknown label"), ParseError);
  }
  SUBCASE("mixed labels in one phi group") {
    write_file(dir.path / "manifest.csv",
               "path,subject,label,view,instance_id\n"
               "a.png,s1,happy,L,i1\n"
               "b.png,s1,sad,S,i1\n");
    CHECK_THROWS_AS(load_manifest((dir.path / "manifest.csv").string()), IntegrityError);
  }
  SUBCASE("missing sidecar") {
    fs::remove(dir.path / "views.txt");
    write_file(dir.path / "manifest.csv",
               "path,subject,label,view,instance_id\na.png,s1,happy,L,i1\n");
    CHECK_THROWS_AS(load_manifest((dir.path / "manifest.csv").string()), ParseError);
  }
}

TEST_CASE("contrast batch sampler satisfies the positive-count contract") {
  TempDir dir("viewfx_sampler_test");
  const Dataset ds = synth_generate(tiny_config(), 3, dir.path.string());
  RngStream rng(21);

  for (int trial = 0; trial < 50; ++trial) {
    const RawBatch batch = sample_contrast_batch(ds, 8, rng);
    REQUIRE(batch.sample_indices.size() == 8);
    // 4 groups x 2 images; siblings adjacent, same phi, distinct views.
    for (int g = 0; g < 4; ++g) {
      CHECK(batch.phis[2 * g] == batch.phis[2 * g + 1]);
      CHECK(batch.views[2 * g] != batch.views[2 * g + 1]);
      CHECK(batch.labels[2 * g] == batch.labels[2 * g + 1]);
    }
    // Groups are distinct within a batch.
    std::set<int> phis(batch.phis.begin(), batch.phis.end());
    CHECK(phis.size() == 4);
  }

  CHECK_THROWS_AS(sample_contrast_batch(ds, 7, rng), InvalidInputError);
  CHECK_THROWS_AS(sample_contrast_batch(ds, 2 * ds.phi_count + 2, rng), InvalidInputError);
}

TEST_CASE("sampler hits every class near its dataset proportion") {
  TempDir dir("viewfx_sampler_freq_test");
  const Dataset ds = synth_generate(tiny_config(), 5, dir.path.string());
  RngStream rng(22);
  std::vector<int> counts(ds.num_classes(), 0);
  int total = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const RawBatch batch = sample_contrast_batch(ds, 8, rng);
    for (int y : batch.labels) {
      ++counts[y];
      ++total;
    }
  }
  const double expect = 1.0 / ds.num_classes();
  for (int c = 0; c < ds.num_classes(); ++c) {
    const double freq = counts[c] / static_cast<double>(total);
    CHECK(freq > expect * 0.8);
    CHECK(freq < expect * 1.2);
  }
}

TEST_CASE("subject-grouped folds partition the dataset without identity leaks") {
  TempDir dir("viewfx_folds_test");
  const Dataset ds = synth_generate(tiny_config(), 13, dir.path.string());
  const std::vector<Fold> folds = split_folds(ds, 3, 99);
  REQUIRE(folds.size() == 3);

  std::vector<int> seen(ds.size(), 0);
  for (const Fold& f : folds) {
    CHECK(f.train_indices.size() + f.test_indices.size() == static_cast<size_t>(ds.size()));
    std::set<int> train_subjects, test_subjects;
    for (int i : f.train_indices) train_subjects.insert(ds.samples[i].subject);
    for (int i : f.test_indices) {
      test_subjects.insert(ds.samples[i].subject);
      ++seen[i];
    }
    for (int s : test_subjects) CHECK(train_subjects.count(s) == 0);
  }
  for (int count : seen) CHECK(count == 1);  // union of test folds = dataset

  const std::vector<Fold> again = split_folds(ds, 3, 99);
  CHECK(again[0].test_indices == folds[0].test_indices);
  CHECK_THROWS_AS(split_folds(ds, 7, 99), InvalidInputError);  // 6 subjects < 7 folds
}

TEST_CASE("label subsampling keeps whole phi groups, stratified by class") {
  TempDir dir("viewfx_subsample_test");
  const Dataset ds = synth_generate(tiny_config(), 17, dir.path.string());

  const Dataset full = subsample_labels(ds, 1.0, 5);
  for (int i = 0; i < ds.size(); ++i) CHECK(full.samples[i].y == ds.samples[i].y);

  const Dataset half = subsample_labels(ds, 0.5, 5);
  int labeled = 0;
  std::map<int, std::set<bool>> group_states;
  std::map<int, int> labeled_groups_per_class;
  std::set<int> counted;
  for (int i = 0; i < ds.size(); ++i) {
    const Sample& s = half.samples[i];
    group_states[s.phi].insert(s.y >= 0);
    if (s.y >= 0) {
      ++labeled;
      if (counted.insert(s.phi).second) ++labeled_groups_per_class[ds.samples[i].y];
    }
  }
  CHECK(labeled == ds.size() / 2);
  for (const auto& [phi, states] : group_states) CHECK(states.size() == 1);
  // 6 groups per class, fraction 0.5 -> ceil(3) = 3 per class.
  for (const auto& [cls, n] : labeled_groups_per_class) CHECK(n == 3);

  CHECK_THROWS_AS(subsample_labels(ds, 0.0, 5), InvalidInputError);
  CHECK_THROWS_AS(subsample_labels(ds, 1.5, 5), InvalidInputError);
}
