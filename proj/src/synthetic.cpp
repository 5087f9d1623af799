#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "frxa/dataset.hpp"

namespace frxa {

namespace {

constexpr double kPi = std::numbers::pi;

// Normalized (unit-square) template following the usual 68-point indexing.
std::array<Point2, 68> unit_template() {
  std::array<Point2, 68> p{};
  for (int t = 0; t < 17; ++t) {  // 1..17 jaw
    const double theta = kPi - kPi * t / 16.0;
    p[t] = {0.5 + 0.40 * std::cos(theta), 0.30 + 0.65 * std::sin(theta)};
  }
  for (int t = 0; t < 5; ++t) {  // 18..22 and 23..27 brows
    const double arch = 0.03 * std::sin(kPi * t / 4.0);
    p[17 + t] = {0.18 + 0.06 * t, 0.27 - arch};
    p[22 + t] = {0.58 + 0.06 * t, 0.27 - arch};
  }
  for (int t = 0; t < 4; ++t) p[27 + t] = {0.5, 0.36 + 0.06 * t};  // 28..31 bridge
  const double nostril_y[5] = {0.60, 0.615, 0.62, 0.615, 0.60};
  for (int t = 0; t < 5; ++t) p[31 + t] = {0.42 + 0.04 * t, nostril_y[t]};  // 32..36
  const auto eye = [&p](int first, double cx) {  // six points, outer-to-inner on the top lid first
    const double dx[6] = {-0.07, -0.03, 0.03, 0.07, 0.03, -0.03};
    const double dy[6] = {0.0, -0.03, -0.03, 0.0, 0.03, 0.03};
    for (int t = 0; t < 6; ++t) p[first + t] = {cx + dx[t], 0.38 + dy[t]};
  };
  eye(36, 0.30);  // 37..42
  eye(42, 0.70);  // 43..48
  for (int j = 0; j < 12; ++j) {  // 49..60 outer lip
    const double a = kPi * j / 6.0;
    p[48 + j] = {0.5 - 0.18 * std::cos(a), 0.78 - 0.07 * std::sin(a)};
  }
  for (int j = 0; j < 8; ++j) {  // 61..68 inner lip
    const double a = kPi * j / 4.0;
    p[60 + j] = {0.5 - 0.14 * std::cos(a), 0.78 - 0.03 * std::sin(a)};
  }
  return p;
}

class Canvas {
 public:
  explicit Canvas(std::size_t size) : size_(size), values_(size * size, 0.0) {}

  // Paints `level` with a one-pixel soft edge wherever `signed_distance(x, y) < 0`.
  template <typename Fn>
  void paint(double level, Fn&& signed_distance, const Box& clip) {
    const auto x0 = static_cast<std::size_t>(std::max(0.0, std::floor(clip.left)));
    const auto y0 = static_cast<std::size_t>(std::max(0.0, std::floor(clip.top)));
    const auto x1 = std::min(size_, static_cast<std::size_t>(std::max(0.0, std::ceil(clip.right))));
    const auto y1 = std::min(size_, static_cast<std::size_t>(std::max(0.0, std::ceil(clip.bottom))));
    for (std::size_t y = y0; y < y1; ++y) {
      for (std::size_t x = x0; x < x1; ++x) {
        const double d = signed_distance(x + 0.5, y + 0.5);
        const double cover = std::clamp(0.5 - d, 0.0, 1.0);
        double& v = values_[y * size_ + x];
        v = v * (1 - cover) + level * cover;
      }
    }
  }

  [[nodiscard]] Box bounds() const { return {0, 0, static_cast<double>(size_), static_cast<double>(size_)}; }

  GrayImage finish(double noise, std::mt19937_64& rng) const {
    GrayImage out(size_, size_);
    std::normal_distribution<double> n(0.0, noise);
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double v = values_[i] + (noise > 0 ? n(rng) : 0.0);
      out.pixels[i] = static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
    }
    return out;
  }

 private:
  std::size_t size_;
  std::vector<double> values_;
};

double segment_distance(double px, double py, Point2 a, Point2 b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  const double t = len2 > 0 ? std::clamp(((px - a.x) * vx + (py - a.y) * vy) / len2, 0.0, 1.0) : 0.0;
  return std::hypot(px - (a.x + t * vx), py - (a.y + t * vy));
}

double ellipse_distance(double px, double py, Point2 c, double rx, double ry) {
  const double r = std::hypot((px - c.x) / rx, (py - c.y) / ry);
  return (r - 1.0) * std::min(rx, ry);
}

constexpr double kSkin = 150.0;
constexpr double kInk = 35.0;
constexpr double kBackground = 60.0;

void draw_face(Canvas& canvas, const LandmarkSet68& lm, double scale) {
  const double line = std::max(1.0, 0.025 * scale);
  // Head: ellipse through the jaw extremes and the brow line.
  const Point2 left = lm.point(1), right = lm.point(17), chin = lm.point(9);
  const Point2 center{(left.x + right.x) / 2, (left.y + chin.y) / 2 - 0.05 * scale};
  const double rx = (right.x - left.x) / 2 + 0.02 * scale;
  const double ry = (chin.y - center.y);
  canvas.paint(kSkin, [&](double x, double y) { return ellipse_distance(x, y, center, rx, ry); }, canvas.bounds());
  const auto polyline = [&](int first, int last, bool closed, double level) {
    for (int i = first; i < last + (closed ? 1 : 0); ++i) {
      const Point2 a = lm.point(i), b = lm.point(i == last ? first : i + 1);
      canvas.paint(level, [&](double x, double y) { return segment_distance(x, y, a, b) - line / 2; },
                   canvas.bounds());
    }
  };
  polyline(18, 22, false, 70);
  polyline(23, 27, false, 70);
  polyline(28, 31, false, 110);
  polyline(32, 36, false, 100);
  polyline(37, 42, true, 60);
  polyline(43, 48, true, 60);
  polyline(49, 60, true, 105);
}

// Class primitive inside `frame`; every class uses a distinct shape.
void draw_primitive(Canvas& canvas, std::size_t cls, const Box& frame) {
  const double w = frame.width(), h = frame.height();
  const double t = std::max(1.3, 0.2 * std::min(w, h));
  const Point2 c{frame.left + w / 2, frame.top + h / 2};
  const auto at = [&](double u, double v) { return Point2{frame.left + u * w, frame.top + v * h}; };
  const auto bar = [&](Point2 a, Point2 b) {
    canvas.paint(kInk, [&](double x, double y) { return segment_distance(x, y, a, b) - t / 2; }, frame);
  };
  switch (cls % 8) {
    case 0:
      bar(at(0.1, 0.9), at(0.9, 0.1));
      break;
    case 1:
      canvas.paint(kInk, [&](double x, double y) { return ellipse_distance(x, y, c, 0.4 * w, 0.4 * h); }, frame);
      break;
    case 2:
      canvas.paint(kInk,
                   [&](double x, double y) { return std::abs(ellipse_distance(x, y, c, 0.4 * w - t / 2, 0.4 * h - t / 2)) - t / 2; },
                   frame);
      break;
    case 3:
      bar(at(0.1, 0.1), at(0.9, 0.9));
      break;
    case 4:
      bar(at(0.1, 0.5), at(0.9, 0.5));
      break;
    case 5:
      bar(at(0.5, 0.1), at(0.5, 0.9));
      break;
    case 6:
      bar(at(0.1, 0.9), at(0.9, 0.1));
      bar(at(0.1, 0.1), at(0.9, 0.9));
      break;
    default:
      for (double u : {0.25, 0.75}) {
        canvas.paint(kInk, [&](double x, double y) { return ellipse_distance(x, y, at(u, 0.5), 0.18 * w, 0.3 * h); },
                     frame);
      }
      break;
  }
}

void paint_signal(Canvas& canvas, std::size_t cls, const Box& box, PatternLayout layout) {
  canvas.paint(kSkin, [](double, double) { return -1.0; }, box);
  if (layout == PatternLayout::centered) {
    draw_primitive(canvas, cls, box);
    return;
  }
  // Two markers flush with the ends of the long axis; the middle stays blank.
  const double shorter = std::min(box.width(), box.height());
  const double side = 0.7 * shorter;
  const double inset = 0.05 * shorter;
  if (box.width() >= box.height()) {
    const double top = box.top + (box.height() - side) / 2;
    draw_primitive(canvas, cls, {box.left + inset, top, box.left + inset + side, top + side});
    draw_primitive(canvas, cls, {box.right - inset - side, top, box.right - inset, top + side});
  } else {
    const double left = box.left + (box.width() - side) / 2;
    draw_primitive(canvas, cls, {left, box.top + inset, left + side, box.top + inset + side});
    draw_primitive(canvas, cls, {left, box.bottom - inset - side, left + side, box.bottom - inset});
  }
}

}  // namespace

LandmarkSet68 landmark_template(std::size_t image_size) {
  LandmarkSet68 out;
  const auto unit = unit_template();
  const auto s = static_cast<double>(image_size);
  for (std::size_t i = 0; i < 68; ++i) out.points[i] = {unit[i].x * s, unit[i].y * s};
  return out;
}

std::vector<std::string> synthetic_class_names(std::size_t classes) {
  static const char* kNames[8] = {"bar_rising", "blob", "ring", "bar_falling", "hbar", "vbar", "cross", "dots"};
  std::vector<std::string> out;
  for (std::size_t k = 0; k < classes; ++k) {
    out.push_back(k < 8 ? std::string(kNames[k]) : fmt::format("{}_{}", kNames[k % 8], k / 8));
  }
  return out;
}

Dataset generate_synthetic(const SyntheticConfig& config) {
  if (config.classes < 2) throw std::invalid_argument("generate_synthetic: need at least 2 classes");
  if (config.per_class < 1) throw std::invalid_argument("generate_synthetic: need at least 1 sample per class");
  if (config.image_size < 16) throw std::invalid_argument("generate_synthetic: image_size must be >= 16");

  Dataset ds;
  ds.name = fmt::format("synthetic-{}", region_name(config.signal_region));
  ds.class_names = synthetic_class_names(config.classes);
  std::mt19937_64 rng(config.seed);
  const auto scale = static_cast<double>(config.image_size);
  const LandmarkSet68 base = landmark_template(config.image_size);
  std::normal_distribution<double> shift(0.0, 0.012 * scale);
  std::uniform_real_distribution<double> zoom(0.97, 1.03);
  std::normal_distribution<double> wobble(0.0, 0.004 * scale);
  const std::size_t test_per_class = config.per_class / 5;

  for (std::size_t k = 0; k < config.classes; ++k) {
    for (std::size_t i = 0; i < config.per_class; ++i) {
      LandmarkSet68 lm;
      const double dx = shift(rng), dy = shift(rng), z = zoom(rng);
      for (std::size_t p = 0; p < 68; ++p) {
        const Point2 b = base.points[p];
        lm.points[p] = {scale / 2 + (b.x - scale / 2) * z + dx + wobble(rng),
                        scale / 2 + (b.y - scale / 2) * z + dy + wobble(rng)};
      }
      Canvas canvas(config.image_size);
      canvas.paint(kBackground, [](double, double) { return -1.0; }, canvas.bounds());
      draw_face(canvas, lm, scale);
      const Box signal = region_box(lm, config.signal_region, config.image_size, config.image_size, 0.0);
      paint_signal(canvas, k, signal, config.layout);

      LabeledFace face;
      face.image = canvas.finish(config.pixel_noise, rng);
      face.label = static_cast<int>(k);
      face.landmarks = lm;
      face.split = i < config.per_class - test_per_class ? Split::train : Split::test;
      face.source_id = fmt::format("synth_c{}_{:04}", k, i);
      ds.samples.push_back(std::move(face));
    }
  }
  return ds;
}

}  // namespace frxa
