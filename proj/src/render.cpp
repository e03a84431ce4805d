#include "fakenews/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fakenews/errors.hpp"

namespace fakenews {

Canvas::Canvas(int width, int height, Rgb background) : width_(width), height_(height) {
    pixels_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            set_pixel(x, y, background);
        }
    }
}

void Canvas::set_pixel(int x, int y, Rgb color) {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) {
        return;
    }
    const std::size_t offset =
        (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
         static_cast<std::size_t>(x)) * 3;
    pixels_[offset] = color.r;
    pixels_[offset + 1] = color.g;
    pixels_[offset + 2] = color.b;
}

void Canvas::fill_rect(int x, int y, int w, int h, Rgb color) {
    for (int yy = y; yy < y + h; ++yy) {
        for (int xx = x; xx < x + w; ++xx) {
            set_pixel(xx, yy, color);
        }
    }
}

void Canvas::draw_line(int x0, int y0, int x1, int y1, Rgb color) {
    const int dx = std::abs(x1 - x0);
    const int dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1;
    const int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        set_pixel(x0, y0, color);
        if (x0 == x1 && y0 == y1) {
            break;
        }
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

void Canvas::save_ppm(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write image: " + path);
    }
    out << "P6\n" << width_ << ' ' << height_ << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels_.data()),
              static_cast<std::streamsize>(pixels_.size()));
    if (!out) {
        throw ConfigError("failed writing image: " + path);
    }
}

void render_bar_chart(const std::string& path, const std::vector<std::string>& labels,
                      const std::vector<double>& values) {
    const int width = 480;
    const int height = 320;
    const int margin = 24;
    Canvas canvas(width, height);

    const double peak = values.empty() ? 1.0 : std::max(1e-12, *std::max_element(values.begin(),
                                                                                 values.end()));
    const int bars = static_cast<int>(labels.size());
    if (bars == 0) {
        canvas.save_ppm(path);
        return;
    }
    const int slot = (width - 2 * margin) / bars;
    static const Rgb palette[] = {{66, 133, 244}, {219, 68, 55}, {244, 180, 0},
                                  {15, 157, 88},  {171, 71, 188}};
    for (int i = 0; i < bars; ++i) {
        const double value = values[static_cast<std::size_t>(i)];
        const int bar_height =
            static_cast<int>(std::round((height - 2 * margin) * (value / peak)));
        canvas.fill_rect(margin + i * slot + slot / 6, height - margin - bar_height,
                         slot - slot / 3, bar_height, palette[i % 5]);
    }
    canvas.draw_line(margin, height - margin, width - margin, height - margin, {0, 0, 0});
    canvas.draw_line(margin, margin, margin, height - margin, {0, 0, 0});
    canvas.save_ppm(path);
}

void render_heatmap(const std::string& path,
                    const std::vector<std::vector<std::uint64_t>>& cells) {
    const int k = static_cast<int>(cells.size());
    const int cell_px = 96;
    const int margin = 12;
    const int side = k * cell_px + 2 * margin;
    Canvas canvas(side, side);
    std::uint64_t peak = 1;
    for (const auto& row : cells) {
        for (std::uint64_t value : row) {
            peak = std::max(peak, value);
        }
    }
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            const double share = static_cast<double>(
                                     cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) /
                                 static_cast<double>(peak);
            const auto level = static_cast<std::uint8_t>(std::round(255.0 * (1.0 - share)));
            canvas.fill_rect(margin + j * cell_px, margin + i * cell_px, cell_px, cell_px,
                             {level, level, 255});
        }
    }
    for (int i = 0; i <= k; ++i) {
        canvas.draw_line(margin, margin + i * cell_px, margin + k * cell_px, margin + i * cell_px,
                         {0, 0, 0});
        canvas.draw_line(margin + i * cell_px, margin, margin + i * cell_px, margin + k * cell_px,
                         {0, 0, 0});
    }
    canvas.save_ppm(path);
}

namespace {

void plot_series(Canvas& canvas, const std::vector<double>& series, double lo, double hi,
                 int margin, Rgb color) {
    if (series.size() < 1 || hi <= lo) {
        return;
    }
    const int width = canvas.width();
    const int height = canvas.height();
    const int inner_w = width - 2 * margin;
    const int inner_h = height - 2 * margin;
    const auto point_x = [&](std::size_t i) {
        return series.size() == 1
                   ? margin + inner_w / 2
                   : margin + static_cast<int>(std::round(
                                  inner_w * static_cast<double>(i) /
                                  static_cast<double>(series.size() - 1)));
    };
    const auto point_y = [&](double value) {
        const double unit = (value - lo) / (hi - lo);
        return height - margin - static_cast<int>(std::round(inner_h * unit));
    };
    for (std::size_t i = 1; i < series.size(); ++i) {
        canvas.draw_line(point_x(i - 1), point_y(series[i - 1]), point_x(i), point_y(series[i]),
                         color);
    }
    if (series.size() == 1) {
        canvas.set_pixel(point_x(0), point_y(series[0]), color);
    }
}

} // namespace

void render_curves(const std::string& path, const std::vector<double>& train_loss,
                   const std::vector<double>& val_loss, const std::vector<double>& train_f1,
                   const std::vector<double>& val_f1) {
    const int width = 560;
    const int height = 360;
    const int margin = 28;
    Canvas canvas(width, height);

    double loss_hi = 1e-9;
    for (const auto* series : {&train_loss, &val_loss}) {
        for (double value : *series) {
            loss_hi = std::max(loss_hi, value);
        }
    }
    plot_series(canvas, train_loss, 0.0, loss_hi, margin, {15, 157, 88}); // green
    plot_series(canvas, val_loss, 0.0, loss_hi, margin, {219, 68, 55});   // red
    plot_series(canvas, train_f1, 0.0, 1.0, margin, {255, 152, 0});       // orange
    plot_series(canvas, val_f1, 0.0, 1.0, margin, {66, 133, 244});        // blue
    canvas.draw_line(margin, height - margin, width - margin, height - margin, {0, 0, 0});
    canvas.draw_line(margin, margin, margin, height - margin, {0, 0, 0});
    canvas.save_ppm(path);
}

} // namespace fakenews
