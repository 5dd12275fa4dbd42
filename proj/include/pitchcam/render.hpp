#pragma once

#include <cstdint>
#include <vector>

#include "pitchcam/field.hpp"
#include "pitchcam/observe.hpp"

namespace pitchcam {

/// Binary image; pixel (x, y) stands for the image point (x, y).
class Mask {
 public:
  explicit Mask(const ImageSize& size);

  const ImageSize& size() const { return size_; }
  bool get(int x, int y) const { return data_[index(x, y)] != 0; }
  void set(int x, int y) { data_[index(x, y)] = 1; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < size_.width && y < size_.height; }
  std::size_t count() const;
  std::vector<Pixel> pixels() const;
  const std::vector<std::uint8_t>& data() const { return data_; }

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * size_.width + x; }

  ImageSize size_;
  std::vector<std::uint8_t> data_;
};

/// 5 px at 1080 lines, proportional to the image height.
double default_stroke_px(const ImageSize& image);

/// Sets every pixel within stroke / 2 of the projected polyline (a lone
/// usable sample becomes a disc).
void draw_polyline(Mask& mask, const ProjectedPolyline& polyline, double stroke_px);

/// Mask of one template element, sampled at kMaskSamplingStep.
void draw_element(Mask& mask, const CameraState& cam, const FieldTemplate& field, ElementClass c, double stroke_px);

/// All template elements.
Mask render_template(const CameraState& cam, const FieldTemplate& field, double stroke_px);

/// Union of every class of the segmentation; point lists are drawn as discs.
Mask segmentation_mask(const SegmentationInput& seg, double stroke_px);

/// |a & b| / |a | b|, 0 when the union is empty.
double jaccard(const Mask& a, const Mask& b);

}  // namespace pitchcam
