#pragma once

#include <array>
#include <chrono>
#include <string>
#include <string_view>

#include <json.hpp>

#include "clicklayout/error.hpp"
#include "clicklayout/scene_graph.hpp"

namespace clicklayout {

inline constexpr std::string_view kGenerationEndpointEnv = "CLICKLAYOUT_GEN_ENDPOINT";
inline constexpr std::string_view kFallbackHeader = "X-Clicklayout-Fallback";

struct RenderConfig {
  int canvas_width = 1000;
  int canvas_height = 1000;
  bool show_labels = true;
  std::string generation_endpoint;  // empty: preview fallback only
  std::chrono::milliseconds generation_timeout{120000};
};

/// Stroke colors, indexed by unique_id modulo the palette size.
[[nodiscard]] const std::array<std::string_view, 8>& box_palette();

/// Standalone SVG with a background frame and one outlined rect per box.
/// Byte-identical for identical inputs.
[[nodiscard]] std::string render_layout_preview(const SceneGraph& graph,
                                                const RenderConfig& config);

/// PNG raster of the same preview (outlines only, no label text).
[[nodiscard]] std::string rasterize_layout_preview(const SceneGraph& graph,
                                                   const RenderConfig& config);

struct GeneratedImage {
  std::string bytes;
  std::string media_type;
  bool fallback = false;
};

/// Generation failed; `fallback()` holds the rasterized preview instead.
class GenerationError : public Error {
 public:
  GenerationError(const std::string& message, GeneratedImage fallback)
      : Error(ErrorKind::kGeneration, message), fallback_(std::move(fallback)) {}

  [[nodiscard]] const GeneratedImage& fallback() const noexcept { return fallback_; }

 private:
  GeneratedImage fallback_;
};

/// `{"prompt": ..., "boxes": [{"name", "x", "y", "width", "height"}]}` in
/// input box order.
[[nodiscard]] nlohmann::json generation_request_body(const SceneGraph& graph);

/// Asks the layout-to-image service for pixels. Without an endpoint, returns
/// the rasterized preview with `fallback` set. Throws GenerationError on
/// transport failure and Error(kProtocol) on a non-image reply.
[[nodiscard]] GeneratedImage request_generated_image(const SceneGraph& graph,
                                                     const RenderConfig& config);

}  // namespace clicklayout
