#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "dnaskew/jpeg.hpp"

namespace dnaskew {

inline constexpr double kDefaultReferenceDb = 50.0;

/// PSNR over all samples of all channels; +infinity for identical images.
/// Throws std::invalid_argument when shapes differ.
double psnr(const Image& a, const Image& b);

struct QualityResult {
  bool undecodable = false;
  double loss_db = 0.0;  // >= 0; meaningless when undecodable
  double psnr_db = std::numeric_limits<double>::infinity();

  static QualityResult undecodable_result() {
    return {true, std::numeric_limits<double>::infinity(), 0.0};
  }
};

/// loss = max(0, ref_db - psnr(original, retrieved)); 0 for identical bytes;
/// undecodable when the retrieved file fails to decode or changes shape.
/// Throws std::invalid_argument if the original does not decode.
QualityResult quality_loss(std::span<const std::uint8_t> original,
                           std::span<const std::uint8_t> retrieved,
                           double ref_db = kDefaultReferenceDb);

/// quality_loss with the original decoded once.
class QualityEvaluator {
 public:
  explicit QualityEvaluator(std::vector<std::uint8_t> original, double ref_db = kDefaultReferenceDb);
  QualityResult operator()(std::span<const std::uint8_t> retrieved) const;
  const Image& reference() const { return image_; }
  const std::vector<std::uint8_t>& original() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
  Image image_;
  double ref_db_;
};

}  // namespace dnaskew
