#include "viewfx/data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace fs = std::filesystem;

namespace viewfx {

void Dataset::validate() const {
  check_input(!samples.empty(), "dataset has no samples");
  check_input(!class_names.empty() && !view_names.empty(), "dataset is missing name tables");
  std::unordered_map<int, const Sample*> group_head;
  for (size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    check_input(s.y < num_classes(), "sample " + std::to_string(i) + " has class id out of range");
    check_input(s.v >= 0 && s.v < num_views(),
                "sample " + std::to_string(i) + " has view id out of range");
    check_input(s.subject >= 0 && s.subject < static_cast<int>(subject_names.size()),
                "sample " + std::to_string(i) + " has subject id out of range");
    check_input(s.phi >= 0 && s.phi < phi_count,
                "sample " + std::to_string(i) + " has phi id out of range");
    const auto [it, inserted] = group_head.emplace(s.phi, &s);
    if (!inserted) {
      if (it->second->y != s.y) {
        throw IntegrityError("phi group " + std::to_string(s.phi) + " mixes labels");
      }
      if (it->second->subject != s.subject) {
        throw IntegrityError("phi group " + std::to_string(s.phi) + " mixes subjects");
      }
    }
  }
}

Image Dataset::load_image(int index) const {
  check_input(index >= 0 && index < size(), "sample index out of range");
  return read_png((fs::path(root) / samples[index].path).string());
}

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open sidecar file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw ParseError("sidecar file is empty: " + path);
  return lines;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

Dataset load_manifest(const std::string& manifest_path) {
  const fs::path dir = fs::path(manifest_path).parent_path();
  Dataset ds;
  ds.root = dir.string();
  ds.class_names = read_lines((dir / "classes.txt").string());
  ds.view_names = read_lines((dir / "views.txt").string());

  std::unordered_map<std::string, int> class_ids, view_ids, subject_ids, phi_ids;
  for (size_t i = 0; i < ds.class_names.size(); ++i) class_ids[ds.class_names[i]] = i;
  for (size_t i = 0; i < ds.view_names.size(); ++i) view_ids[ds.view_names[i]] = i;

  std::ifstream in(manifest_path);
  if (!in) throw ParseError("cannot open manifest: " + manifest_path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ParseError("manifest is empty: " + manifest_path);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "path,subject,label,view,instance_id") {
    throw ParseError("manifest line 1: expected header path,subject,label,view,instance_id");
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_row(line);
    if (f.size() != 5) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": expected 5 fields, got " +
                       std::to_string(f.size()));
    }
    Sample s;
    s.path = f[0];
    const auto cls = class_ids.find(f[2]);
    if (cls == class_ids.end()) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": unknown label '" + f[2] +
                       "'");
    }
    s.y = cls->second;
    const auto view = view_ids.find(f[3]);
    if (view == view_ids.end()) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": unknown view '" + f[3] +
                       "'");
    }
    s.v = view->second;
    auto [sit, s_new] = subject_ids.emplace(f[1], static_cast<int>(subject_ids.size()));
    s.subject = sit->second;
    if (s_new) ds.subject_names.push_back(f[1]);
    auto [pit, p_new] = phi_ids.emplace(f[4], static_cast<int>(phi_ids.size()));
    s.phi = pit->second;
    (void)p_new;
    ds.samples.push_back(std::move(s));
  }
  ds.phi_count = static_cast<int>(phi_ids.size());
  if (ds.samples.empty()) throw ParseError("manifest has no data rows: " + manifest_path);

  ds.validate();
  std::vector<int> group_sizes(ds.phi_count, 0);
  for (const Sample& s : ds.samples) ++group_sizes[s.phi];
  ds.complete = std::all_of(group_sizes.begin(), group_sizes.end(),
                            [&](int g) { return g == ds.num_views(); });
  return ds;
}

void SynthConfig::validate() const {
  check_input(classes >= 2 && classes <= 10, "synth.classes must be in [2,10]");
  check_input(views >= 2 && views <= 7, "synth.views must be in [2,7]");
  check_input(subjects >= 2, "synth.subjects must be at least 2");
  check_input(image_size >= 16 && image_size <= 256, "synth.image_size must be in [16,256]");
}

namespace {

constexpr double kPi = std::numbers::pi;

// Soft coverage with a fixed edge width in glyph units (about one pixel at
// the default 32px raster).
double soft(double inside) { return std::clamp(0.5 + inside / 0.08, 0.0, 1.0); }

double prim_ring(double u, double v, double cx, double cy, double r, double t) {
  const double sd = std::abs(std::hypot(u - cx, v - cy) - r);
  return soft(t * 0.5 - sd);
}

double prim_disk(double u, double v, double cx, double cy, double r) {
  return soft(r - std::hypot(u - cx, v - cy));
}

double prim_bar(double u, double v, double cx, double cy, double angle, double half_len,
                double half_t) {
  const double ca = std::cos(angle), sa = std::sin(angle);
  const double du = u - cx, dv = v - cy;
  const double x = ca * du + sa * dv;
  const double y = -sa * du + ca * dv;
  return soft(half_len - std::abs(x)) * soft(half_t - std::abs(y));
}

double prim_seg(double u, double v, double x0, double y0, double x1, double y1, double half_t) {
  const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
  const double angle = std::atan2(y1 - y0, x1 - x0);
  const double half_len = 0.5 * std::hypot(x1 - x0, y1 - y0);
  return prim_bar(u, v, cx, cy, angle, half_len, half_t);
}

double prim_arc(double u, double v, double cx, double cy, double r, double t, double a0,
                double a1) {
  const double ring = prim_ring(u, v, cx, cy, r, t);
  if (ring <= 0.0) return 0.0;
  const double theta = std::atan2(v - cy, u - cx);
  // Angular soft mask; arcs here never cross the +-pi seam.
  const double ang = soft((theta - a0) * r) * soft((a1 - theta) * r);
  return ring * ang;
}

double prim_square_ring(double u, double v, double half_side, double t) {
  const double sd = std::abs(std::max(std::abs(u), std::abs(v)) - half_side);
  return soft(t * 0.5 - sd);
}

/// Prototype ink coverage for class `cls` at glyph-space point (u, v), v
/// pointing down. `t` is the stroke thickness.
double glyph_ink(int cls, double u, double v, double t) {
  const double ht = t * 0.5;
  switch (cls) {
    case 0:  // ring
      return prim_ring(u, v, 0.0, 0.0, 0.55, t);
    case 1:  // cross
      return std::max(prim_bar(u, v, 0, 0, 0.0, 0.60, ht),
                      prim_bar(u, v, 0, 0, kPi / 2, 0.60, ht));
    case 2:  // saltire
      return std::max(prim_bar(u, v, 0, 0, kPi / 4, 0.65, ht),
                      prim_bar(u, v, 0, 0, -kPi / 4, 0.65, ht));
    case 3:  // smile: lower arc plus two eye dots
      return std::max({prim_arc(u, v, 0.0, 0.05, 0.45, t, 0.2 * kPi, 0.8 * kPi),
                       prim_disk(u, v, -0.25, -0.25, 0.10),
                       prim_disk(u, v, 0.25, -0.25, 0.10)});
    case 4:  // frown: upper arc (center below) plus the same dots
      return std::max({prim_arc(u, v, 0.0, 0.55, 0.45, t, -0.8 * kPi, -0.2 * kPi),
                       prim_disk(u, v, -0.25, -0.25, 0.10),
                       prim_disk(u, v, 0.25, -0.25, 0.10)});
    case 5:  // triangle
      return std::max({prim_seg(u, v, 0.0, -0.55, -0.52, 0.45, ht),
                       prim_seg(u, v, 0.0, -0.55, 0.52, 0.45, ht),
                       prim_seg(u, v, -0.52, 0.45, 0.52, 0.45, ht)});
    case 6:  // square ring
      return prim_square_ring(u, v, 0.48, t);
    case 7:  // two vertical pillars
      return std::max(prim_bar(u, v, -0.32, 0, kPi / 2, 0.55, ht),
                      prim_bar(u, v, 0.32, 0, kPi / 2, 0.55, ht));
    case 8:  // horizontal bar with a dot above
      return std::max(prim_bar(u, v, 0.0, 0.28, 0.0, 0.52, ht),
                      prim_disk(u, v, 0.0, -0.32, 0.15));
    case 9:  // wheel: ring with a vertical spoke
      return std::max(prim_ring(u, v, 0.0, 0.0, 0.52, t * 0.85),
                      prim_bar(u, v, 0, 0, kPi / 2, 0.50, ht * 0.9));
    default:
      throw InvalidInputError("glyph class out of range: " + std::to_string(cls));
  }
}

const char* kClassNames[10] = {"ring",     "cross",  "saltire", "smile", "frown",
                               "triangle", "square", "pillars", "bardot", "wheel"};

std::vector<std::string> synth_view_names(int views) {
  if (views == 5) return {"FL", "HL", "S", "HR", "FR"};
  if (views == 7) return {"FL", "L", "HL", "S", "HR", "R", "FR"};
  std::vector<std::string> names;
  for (int v = 0; v < views; ++v) names.push_back("v" + std::to_string(v));
  return names;
}

// Stream tags for the generator's stateless substreams.
constexpr uint64_t kSubjectTag = 0x5311;
constexpr uint64_t kCaptureTag = 0xCA97;
constexpr uint64_t kNoiseTag = 0x1015E;

struct SubjectTraits {
  double scale, rot, thickness, brightness, dx, dy;
};

SubjectTraits subject_traits(uint64_t seed, int subject) {
  RngStream rng = RngStream::derive(seed, kSubjectTag, static_cast<uint64_t>(subject));
  SubjectTraits t;
  t.scale = rng.uniform(0.85, 1.15);
  t.rot = rng.uniform(-0.15, 0.15);
  t.thickness = rng.uniform(0.80, 1.25);
  t.brightness = rng.uniform(0.85, 1.00);
  t.dx = rng.uniform(-0.08, 0.08);
  t.dy = rng.uniform(-0.08, 0.08);
  return t;
}

}  // namespace

Image synth_render(const SynthConfig& config, uint64_t seed, int subject, int cls, int view) {
  config.validate();
  check_input(subject >= 0 && subject < config.subjects, "subject index out of range");
  check_input(cls >= 0 && cls < config.classes, "class index out of range");
  check_input(view >= 0 && view < config.views, "view index out of range");

  const SubjectTraits traits = subject_traits(seed, subject);
  RngStream cap_rng = RngStream::derive(seed, kCaptureTag, static_cast<uint64_t>(subject),
                                        static_cast<uint64_t>(cls));
  const double rot = traits.rot + cap_rng.uniform(-0.05, 0.05);
  const double scale = traits.scale * cap_rng.uniform(0.95, 1.05);
  const double thickness = 0.13 * traits.thickness;

  const int phi = subject * config.classes + cls;
  RngStream noise_rng = RngStream::derive(seed, kNoiseTag, static_cast<uint64_t>(phi),
                                          static_cast<uint64_t>(view));
  const double ink_level = 0.92 * traits.brightness * (1.0 + 0.03 * noise_rng.normal());

  // Azimuth in [-1, 1]; middle view is frontal. The horizontal axis is
  // compressed and sheared with azimuth, and the two extreme views lose a
  // lateral band to an occluder, mimicking profile-view difficulty.
  const double alpha =
      config.views == 1 ? 0.0 : -1.0 + 2.0 * view / static_cast<double>(config.views - 1);
  const double compress = 1.0 - 0.55 * std::abs(alpha);
  const double shear = 0.35 * alpha;
  const bool extreme = config.views >= 3 && (view == 0 || view == config.views - 1);
  const double occl_edge = 0.45;

  const int s = config.image_size;
  Image img(1, s, s);
  const double background = 0.10;
  for (int py = 0; py < s; ++py) {
    const double y = 2.0 * (py + 0.5) / s - 1.0;
    for (int px = 0; px < s; ++px) {
      const double x = 2.0 * (px + 0.5) / s - 1.0;
      double value;
      if (extreme && x * alpha > occl_edge) {
        value = 0.30;  // flat lateral occluder on the camera side
      } else {
        // Invert view transform, then the subject pose.
        const double u_view = (x - shear * y) / compress;
        const double du = u_view - traits.dx;
        const double dv = y - traits.dy;
        const double ca = std::cos(-rot), sa = std::sin(-rot);
        const double u = (ca * du - sa * dv) / scale;
        const double v = (sa * du + ca * dv) / scale;
        const double cover = glyph_ink(cls, u, v, thickness);
        value = background + (ink_level - background) * cover;
      }
      value += 0.03 * noise_rng.normal();
      img.at(0, py, px) = static_cast<float>(std::clamp(value, 0.0, 1.0));
    }
  }
  return img;
}

Dataset synth_generate(const SynthConfig& config, uint64_t seed, const std::string& out_dir) {
  config.validate();
  fs::create_directories(fs::path(out_dir) / "imgs");

  Dataset ds;
  ds.root = out_dir;
  for (int c = 0; c < config.classes; ++c) ds.class_names.push_back(kClassNames[c]);
  ds.view_names = synth_view_names(config.views);

  std::ofstream manifest(fs::path(out_dir) / "manifest.csv");
  if (!manifest) throw std::runtime_error("cannot write manifest in " + out_dir);
  manifest << "path,subject,label,view,instance_id\n";

  char buf[64];
  for (int subject = 0; subject < config.subjects; ++subject) {
    std::snprintf(buf, sizeof(buf), "s%03d", subject);
    const std::string subj_name = buf;
    ds.subject_names.push_back(subj_name);
    for (int cls = 0; cls < config.classes; ++cls) {
      const std::string instance = subj_name + "_c" + std::to_string(cls);
      for (int view = 0; view < config.views; ++view) {
        const Image img = synth_render(config, seed, subject, cls, view);
        const std::string rel =
            "imgs/" + instance + "_" + ds.view_names[view] + ".png";
        write_png(img, (fs::path(out_dir) / rel).string());
        manifest << rel << ',' << subj_name << ',' << ds.class_names[cls] << ','
                 << ds.view_names[view] << ',' << instance << '\n';
        Sample s;
        s.path = rel;
        s.y = cls;
        s.v = view;
        s.phi = subject * config.classes + cls;
        s.subject = subject;
        ds.samples.push_back(std::move(s));
      }
    }
  }
  manifest.close();
  ds.phi_count = config.subjects * config.classes;
  ds.complete = true;

  {
    std::ofstream cls_out(fs::path(out_dir) / "classes.txt");
    for (const std::string& n : ds.class_names) cls_out << n << '\n';
    std::ofstream view_out(fs::path(out_dir) / "views.txt");
    for (const std::string& n : ds.view_names) view_out << n << '\n';
    nlohmann::json meta{{"classes", config.classes},
                        {"views", config.views},
                        {"subjects", config.subjects},
                        {"image_size", config.image_size},
                        {"seed", seed}};
    std::ofstream meta_out(fs::path(out_dir) / "meta.json");
    meta_out << meta.dump(2) << '\n';
  }

  ds.validate();
  return ds;
}

RawBatch sample_contrast_batch(const Dataset& dataset, int n_images, RngStream& rng) {
  check_input(n_images >= 2 && n_images % 2 == 0,
              "contrast batch size must be even and at least 2, got " +
                  std::to_string(n_images));
  std::vector<std::vector<int>> groups(dataset.phi_count);
  for (int i = 0; i < dataset.size(); ++i) {
    groups[dataset.samples[i].phi].push_back(i);
  }
  std::vector<int> eligible;
  for (int g = 0; g < dataset.phi_count; ++g) {
    if (groups[g].size() >= 2) eligible.push_back(g);
  }
  const int want = n_images / 2;
  check_input(static_cast<int>(eligible.size()) >= want,
              "batch needs " + std::to_string(want) + " capture groups with >= 2 views, dataset has " +
                  std::to_string(eligible.size()));

  // Partial Fisher-Yates: draw `want` distinct groups.
  for (int i = 0; i < want; ++i) {
    const int j = i + static_cast<int>(rng.uniform_int(eligible.size() - i));
    std::swap(eligible[i], eligible[j]);
  }

  RawBatch batch;
  for (int gi = 0; gi < want; ++gi) {
    const std::vector<int>& members = groups[eligible[gi]];
    const int first = members[rng.uniform_int(members.size())];
    // Prefer a second member with a different view; fall back to any other.
    std::vector<int> others;
    for (int m : members) {
      if (m != first && dataset.samples[m].v != dataset.samples[first].v) others.push_back(m);
    }
    if (others.empty()) {
      for (int m : members) {
        if (m != first) others.push_back(m);
      }
    }
    const int second = others[rng.uniform_int(others.size())];
    for (int idx : {first, second}) {
      batch.sample_indices.push_back(idx);
      batch.labels.push_back(dataset.samples[idx].y);
      batch.phis.push_back(dataset.samples[idx].phi);
      batch.views.push_back(dataset.samples[idx].v);
    }
  }
  return batch;
}

std::vector<Fold> split_folds(const Dataset& dataset, int k, uint64_t seed, bool by_subject) {
  check_input(k >= 2, "fold count must be at least 2");
  std::vector<Fold> folds(k);
  if (by_subject) {
    std::vector<int> subjects(dataset.subject_names.size());
    for (size_t i = 0; i < subjects.size(); ++i) subjects[i] = static_cast<int>(i);
    check_input(static_cast<int>(subjects.size()) >= k,
                "need at least as many subjects as folds");
    RngStream rng = RngStream::derive(seed, 0xF01D, static_cast<uint64_t>(k));
    rng.shuffle(subjects);
    std::vector<int> fold_of_subject(subjects.size());
    for (size_t i = 0; i < subjects.size(); ++i) {
      fold_of_subject[subjects[i]] = static_cast<int>(i) % k;
    }
    for (int i = 0; i < dataset.size(); ++i) {
      const int f = fold_of_subject[dataset.samples[i].subject];
      for (int j = 0; j < k; ++j) {
        (j == f ? folds[j].test_indices : folds[j].train_indices).push_back(i);
      }
    }
  } else {
    check_input(dataset.size() >= k, "need at least as many samples as folds");
    std::vector<int> order(dataset.size());
    for (int i = 0; i < dataset.size(); ++i) order[i] = i;
    RngStream rng = RngStream::derive(seed, 0xF01D, static_cast<uint64_t>(k));
    rng.shuffle(order);
    for (size_t pos = 0; pos < order.size(); ++pos) {
      const int f = static_cast<int>(pos) % k;
      for (int j = 0; j < k; ++j) {
        (j == f ? folds[j].test_indices : folds[j].train_indices).push_back(order[pos]);
      }
    }
  }
  return folds;
}

Dataset subsample_labels(const Dataset& dataset, double fraction, uint64_t seed) {
  check_input(fraction > 0.0 && fraction <= 1.0, "label fraction must be in (0,1]");
  Dataset out = dataset;
  if (fraction == 1.0) return out;

  // Group phis by class, keep ceil(fraction * count) per class.
  std::map<int, std::vector<int>> phis_by_class;
  std::unordered_map<int, int> class_of_phi;
  for (const Sample& s : dataset.samples) {
    if (s.y < 0) continue;
    if (class_of_phi.emplace(s.phi, s.y).second) {
      phis_by_class[s.y].push_back(s.phi);
    }
  }
  std::vector<bool> keep(dataset.phi_count, false);
  for (auto& [cls, phis] : phis_by_class) {
    RngStream rng = RngStream::derive(seed, 0x1AB, static_cast<uint64_t>(cls));
    rng.shuffle(phis);
    const int kept = static_cast<int>(
        std::ceil(fraction * static_cast<double>(phis.size())));
    for (int i = 0; i < kept; ++i) keep[phis[i]] = true;
  }
  for (Sample& s : out.samples) {
    if (s.y >= 0 && !keep[s.phi]) s.y = -1;
  }
  return out;
}

}  // namespace viewfx
