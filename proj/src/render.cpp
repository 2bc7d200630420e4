#include "clicklayout/render.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include <png.h>

#include "clicklayout/http_client.hpp"

namespace clicklayout {

using nlohmann::json;

namespace {

constexpr int kStrokeWidth = 3;

struct PixelRect {
  long x, y, width, height;
};

PixelRect to_pixels(const NormRect& r, const RenderConfig& c) {
  return {std::lround(r.x * c.canvas_width), std::lround(r.y * c.canvas_height),
          std::lround(r.width * c.canvas_width), std::lround(r.height * c.canvas_height)};
}

std::string_view color_for(ObjectId id) {
  const auto& palette = box_palette();
  const auto n = static_cast<ObjectId>(palette.size());
  return palette[static_cast<std::size_t>(((id % n) + n) % n)];
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

void check_canvas(const RenderConfig& c) {
  if (c.canvas_width <= 0 || c.canvas_height <= 0) {
    throw Error(ErrorKind::kArgument, "canvas dimensions must be positive");
  }
}

struct Rgb {
  std::uint8_t r, g, b;
};

Rgb parse_hex(std::string_view hex) {
  auto byte = [&](std::size_t at) {
    return static_cast<std::uint8_t>(std::stoi(std::string(hex.substr(at, 2)), nullptr, 16));
  };
  return {byte(1), byte(3), byte(5)};
}

}  // namespace

const std::array<std::string_view, 8>& box_palette() {
  static constexpr std::array<std::string_view, 8> kPalette = {
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  return kPalette;
}

std::string render_layout_preview(const SceneGraph& graph, const RenderConfig& config) {
  check_canvas(config);
  const std::string w = std::to_string(config.canvas_width);
  const std::string h = std::to_string(config.canvas_height);
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + w + "\" height=\"" + h +
         "\" viewBox=\"0 0 " + w + " " + h + "\">\n";
  svg += "  <rect class=\"frame\" x=\"0\" y=\"0\" width=\"" + w + "\" height=\"" + h +
         "\" fill=\"#ffffff\" stroke=\"#333333\" stroke-width=\"2\"/>\n";
  if (!graph.prompt.empty()) svg += "  <title>" + xml_escape(graph.prompt) + "</title>\n";
  for (const auto& b : graph.boxes) {
    const PixelRect p = to_pixels(b.box, config);
    const std::string color(color_for(b.unique_id));
    svg += "  <rect class=\"box\" data-id=\"" + std::to_string(b.unique_id) + "\" x=\"" +
           std::to_string(p.x) + "\" y=\"" + std::to_string(p.y) + "\" width=\"" +
           std::to_string(p.width) + "\" height=\"" + std::to_string(p.height) +
           "\" fill=\"" + color + "\" fill-opacity=\"0.15\" stroke=\"" + color +
           "\" stroke-width=\"" + std::to_string(kStrokeWidth) + "\"/>\n";
    if (config.show_labels) {
      svg += "  <text class=\"label\" x=\"" + std::to_string(p.x + 4) + "\" y=\"" +
             std::to_string(p.y + 18) + "\" font-family=\"sans-serif\" font-size=\"16\" fill=\"" +
             color + "\">" + xml_escape(b.name) + "</text>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

std::string rasterize_layout_preview(const SceneGraph& graph, const RenderConfig& config) {
  check_canvas(config);
  const long W = config.canvas_width;
  const long H = config.canvas_height;
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(W * H * 3), 0xff);
  auto put = [&](long x, long y, Rgb c) {
    if (x < 0 || y < 0 || x >= W || y >= H) return;
    auto* px = &pixels[static_cast<std::size_t>((y * W + x) * 3)];
    px[0] = c.r;
    px[1] = c.g;
    px[2] = c.b;
  };
  auto outline = [&](const PixelRect& p, Rgb c, int stroke) {
    for (int s = 0; s < stroke; ++s) {
      for (long x = p.x; x < p.x + p.width; ++x) {
        put(x, p.y + s, c);
        put(x, p.y + p.height - 1 - s, c);
      }
      for (long y = p.y; y < p.y + p.height; ++y) {
        put(p.x + s, y, c);
        put(p.x + p.width - 1 - s, y, c);
      }
    }
  };
  outline({0, 0, W, H}, {0x33, 0x33, 0x33}, 2);
  for (const auto& b : graph.boxes) {
    outline(to_pixels(b.box, config), parse_hex(color_for(b.unique_id)), kStrokeWidth);
  }

  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(W);
  image.height = static_cast<png_uint_32>(H);
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(ErrorKind::kGeneration, std::string("PNG encoding failed: ") + image.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(ErrorKind::kGeneration, std::string("PNG encoding failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

json generation_request_body(const SceneGraph& graph) {
  json boxes = json::array();
  for (const auto& b : graph.boxes) {
    boxes.push_back({{"name", b.name},
                     {"x", b.box.x},
                     {"y", b.box.y},
                     {"width", b.box.width},
                     {"height", b.box.height}});
  }
  return {{"prompt", graph.prompt}, {"boxes", boxes}};
}

GeneratedImage request_generated_image(const SceneGraph& graph, const RenderConfig& config) {
  require_valid(graph, "cannot generate from layout");
  auto preview = [&] {
    return GeneratedImage{rasterize_layout_preview(graph, config), "image/png", true};
  };
  if (config.generation_endpoint.empty()) return preview();

  const http::Endpoint endpoint = http::parse_endpoint(config.generation_endpoint);
  http::PostOptions options;
  options.timeout = config.generation_timeout;
  std::optional<http::Response> response;
  {
    auto slot = http::InflightLimiter::instance().acquire(endpoint.origin);
    response = http::post(endpoint, generation_request_body(graph).dump(), "application/json",
                          options);
  }
  if (!response) {
    throw GenerationError("generation service unreachable at " + endpoint.url(), preview());
  }
  if (response->status < 200 || response->status >= 300) {
    throw GenerationError("generation service returned HTTP " + std::to_string(response->status),
                          preview());
  }
  if (!response->content_type.starts_with("image/")) {
    throw Error(ErrorKind::kProtocol,
                "generation service replied with non-image content '" + response->content_type + "'");
  }
  return {std::move(response->body), response->content_type, false};
}

}  // namespace clicklayout
