#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fakenews {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

/// Minimal RGB raster written as binary PPM (P6); enough for bar charts,
/// heatmaps and line plots without an image dependency.
class Canvas {
public:
    Canvas(int width, int height, Rgb background = {255, 255, 255});

    int width() const { return width_; }
    int height() const { return height_; }

    void set_pixel(int x, int y, Rgb color);
    void fill_rect(int x, int y, int w, int h, Rgb color);
    void draw_line(int x0, int y0, int x1, int y1, Rgb color);
    void save_ppm(const std::string& path) const;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_;
};

void render_bar_chart(const std::string& path, const std::vector<std::string>& labels,
                      const std::vector<double>& values);

/// Heatmap of row-normalized counts; darker cell = larger share.
void render_heatmap(const std::string& path,
                    const std::vector<std::vector<std::uint64_t>>& cells);

/// Four series over epochs: train/val loss (green/red, scaled to the loss
/// range) and train/val F1 (orange/blue, scaled to [0,1]).
void render_curves(const std::string& path, const std::vector<double>& train_loss,
                   const std::vector<double>& val_loss, const std::vector<double>& train_f1,
                   const std::vector<double>& val_f1);

} // namespace fakenews
