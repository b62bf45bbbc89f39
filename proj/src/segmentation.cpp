#include "proposalbench/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "proposalbench/errors.hpp"

namespace proposalbench {

void SegmentationParams::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ParameterError("sigma must be positive");
    }
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw ParameterError("k must be positive");
    }
    if (min_size < 1) {
        throw ParameterError("min_size must be at least 1");
    }
}

std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ParameterError("sigma must be positive");
    }
    const int radius = static_cast<int>(std::ceil(4.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    }
    const double sum = std::accumulate(kernel.begin(), kernel.end(), 0.0);
    for (double& v : kernel) v /= sum;
    return kernel;
}

FloatImage gaussian_smooth(const ImageBuffer& img, double sigma) {
    const std::vector<double> kernel = gaussian_kernel(sigma);
    const int radius = static_cast<int>(kernel.size() / 2);
    const int w = img.width();
    const int h = img.height();

    FloatImage horizontal{w, h, std::vector<double>(static_cast<std::size_t>(w) * h * 3)};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    const int sx = std::clamp(x + i, 0, w - 1);
                    acc += kernel[i + radius] * img.at(sx, y)[c];
                }
                horizontal.at(x, y, c) = acc;
            }
        }
    }

    FloatImage out{w, h, std::vector<double>(horizontal.data.size())};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    const int sy = std::clamp(y + i, 0, h - 1);
                    acc += kernel[i + radius] * horizontal.at(x, sy, c);
                }
                out.at(x, y, c) = acc;
            }
        }
    }
    return out;
}

namespace {

struct GraphEdge {
    double weight;
    int a;  // a < b
    int b;
};

class DisjointSets {
public:
    explicit DisjointSets(int n) : parent_(n), size_(n, 1), internal_(n, 0.0) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int v) {
        int root = v;
        while (parent_[root] != root) root = parent_[root];
        while (parent_[v] != root) {
            const int next = parent_[v];
            parent_[v] = root;
            v = next;
        }
        return root;
    }

    // Returns the surviving root; internal difference becomes `weight`.
    int join(int ra, int rb, double weight) {
        if (size_[ra] < size_[rb]) std::swap(ra, rb);
        parent_[rb] = ra;
        size_[ra] += size_[rb];
        internal_[ra] = weight;
        return ra;
    }

    int size(int root) const { return size_[root]; }
    double internal(int root) const { return internal_[root]; }

private:
    std::vector<int> parent_;
    std::vector<int> size_;
    std::vector<double> internal_;
};

double rgb_distance(const FloatImage& img, int x0, int y0, int x1, int y1) {
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double d = img.at(x0, y0, c) - img.at(x1, y1, c);
        sum += d * d;
    }
    return std::sqrt(sum);
}

std::vector<GraphEdge> build_grid_edges(const FloatImage& smooth) {
    const int w = smooth.width;
    const int h = smooth.height;
    std::vector<GraphEdge> edges;
    edges.reserve(static_cast<std::size_t>(w) * h * 4);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int a = y * w + x;
            if (x + 1 < w) {
                edges.push_back({rgb_distance(smooth, x, y, x + 1, y), a, a + 1});
            }
            if (y + 1 < h) {
                edges.push_back({rgb_distance(smooth, x, y, x, y + 1), a, a + w});
                if (x + 1 < w) {
                    edges.push_back({rgb_distance(smooth, x, y, x + 1, y + 1), a, a + w + 1});
                }
                if (x > 0) {
                    edges.push_back({rgb_distance(smooth, x, y, x - 1, y + 1), a, a + w - 1});
                }
            }
        }
    }
    std::sort(edges.begin(), edges.end(), [](const GraphEdge& l, const GraphEdge& r) {
        if (l.weight != r.weight) return l.weight < r.weight;
        if (l.a != r.a) return l.a < r.a;
        return l.b < r.b;
    });
    return edges;
}

}  // namespace

LabelMap felzenszwalb(const ImageBuffer& img, const SegmentationParams& params) {
    params.validate();
    if (img.empty()) {
        throw ParameterError("empty image");
    }
    const int w = img.width();
    const int h = img.height();
    const std::vector<GraphEdge> edges = build_grid_edges(gaussian_smooth(img, params.sigma));

    DisjointSets sets(w * h);
    for (const GraphEdge& e : edges) {
        const int ra = sets.find(e.a);
        const int rb = sets.find(e.b);
        if (ra == rb) continue;
        const double ta = sets.internal(ra) + params.k / sets.size(ra);
        const double tb = sets.internal(rb) + params.k / sets.size(rb);
        if (e.weight <= std::min(ta, tb)) {
            sets.join(ra, rb, e.weight);
        }
    }

    for (const GraphEdge& e : edges) {
        const int ra = sets.find(e.a);
        const int rb = sets.find(e.b);
        if (ra == rb) continue;
        if (sets.size(ra) < params.min_size || sets.size(rb) < params.min_size) {
            // Keeps the internal difference of the larger side.
            const double keep = sets.size(ra) >= sets.size(rb) ? sets.internal(ra) : sets.internal(rb);
            sets.join(ra, rb, keep);
        }
    }

    LabelMap out{w, h, std::vector<int>(static_cast<std::size_t>(w) * h), 0};
    std::vector<int> root_label(static_cast<std::size_t>(w) * h, -1);
    for (int i = 0; i < w * h; ++i) {
        const int root = sets.find(i);
        if (root_label[root] < 0) root_label[root] = out.segment_count++;
        out.labels[i] = root_label[root];
    }
    return out;
}

namespace {

struct Gradient {
    double gx;
    double gy;
};

// 3x3 Sobel on one channel with edge replication.
Gradient sobel(const ImageBuffer& img, int x, int y, int c) {
    const int w = img.width();
    const int h = img.height();
    auto px = [&](int dx, int dy) -> double {
        return img.at(std::clamp(x + dx, 0, w - 1), std::clamp(y + dy, 0, h - 1))[c];
    };
    const double gx = (px(1, -1) + 2 * px(1, 0) + px(1, 1)) - (px(-1, -1) + 2 * px(-1, 0) + px(-1, 1));
    const double gy = (px(-1, 1) + 2 * px(0, 1) + px(1, 1)) - (px(-1, -1) + 2 * px(0, -1) + px(1, -1));
    return {gx, gy};
}

double undirected_angle(double gx, double gy) {
    double theta = std::atan2(gy, gx);
    if (theta < 0.0) theta += std::numbers::pi;
    if (theta >= std::numbers::pi) theta -= std::numbers::pi;
    return theta;
}

}  // namespace

RegionAnalysis region_stats(const LabelMap& labels, const ImageBuffer& img) {
    if (labels.width != img.width() || labels.height != img.height()) {
        throw ParameterError("label map and image dimensions differ");
    }
    const int w = img.width();
    const int h = img.height();
    const int n = labels.segment_count;

    RegionAnalysis out;
    out.regions.resize(n);
    std::vector<int> min_x(n, w), min_y(n, h), max_x(n, -1), max_y(n, -1);
    std::vector<std::array<long, kColorHistSize>> color_counts(n);
    for (auto& counts : color_counts) counts.fill(0);
    std::vector<TextureHistogram> texture(n);
    for (auto& t : texture) t.fill(0.0);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int l = labels.at(x, y);
            if (l < 0 || l >= n) {
                throw ParameterError("label out of range");
            }
            RegionStats& r = out.regions[l];
            ++r.size;
            min_x[l] = std::min(min_x[l], x);
            min_y[l] = std::min(min_y[l], y);
            max_x[l] = std::max(max_x[l], x);
            max_y[l] = std::max(max_y[l], y);
            const Rgb& p = img.at(x, y);
            for (int c = 0; c < 3; ++c) {
                ++color_counts[l][c * kColorBinsPerChannel + p[c] * kColorBinsPerChannel / 256];
                const Gradient g = sobel(img, x, y, c);
                const double mag = std::hypot(g.gx, g.gy);
                if (mag > 0.0) {
                    const double theta = undirected_angle(g.gx, g.gy);
                    int bin = static_cast<int>(theta / (std::numbers::pi / kTextureBinsPerChannel));
                    bin = std::min(bin, kTextureBinsPerChannel - 1);
                    texture[l][c * kTextureBinsPerChannel + bin] += mag;
                }
            }
        }
    }

    for (int l = 0; l < n; ++l) {
        RegionStats& r = out.regions[l];
        r.label = l;
        if (r.size == 0) {
            throw ParameterError("label map has an empty segment");
        }
        r.bbox = {min_x[l], min_y[l], max_x[l] - min_x[l] + 1, max_y[l] - min_y[l] + 1};
        const double total = 3.0 * static_cast<double>(r.size);
        for (int i = 0; i < kColorHistSize; ++i) {
            r.color_hist[i] = static_cast<double>(color_counts[l][i]) / total;
        }
        const double mass = std::accumulate(texture[l].begin(), texture[l].end(), 0.0);
        if (mass > 0.0) {
            for (int i = 0; i < kTextureHistSize; ++i) r.texture_hist[i] = texture[l][i] / mass;
        } else {
            r.texture_degenerate = true;
        }
    }

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int l = labels.at(x, y);
            if (x + 1 < w && labels.at(x + 1, y) != l) {
                out.adjacency.emplace_back(std::min(l, labels.at(x + 1, y)), std::max(l, labels.at(x + 1, y)));
            }
            if (y + 1 < h && labels.at(x, y + 1) != l) {
                out.adjacency.emplace_back(std::min(l, labels.at(x, y + 1)), std::max(l, labels.at(x, y + 1)));
            }
        }
    }
    std::sort(out.adjacency.begin(), out.adjacency.end());
    out.adjacency.erase(std::unique(out.adjacency.begin(), out.adjacency.end()), out.adjacency.end());
    return out;
}

}  // namespace proposalbench
