#include "proposalbench/edgeboxes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <set>

#include "proposalbench/errors.hpp"

namespace proposalbench {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_pi(double theta) {
    theta = std::fmod(theta, kPi);
    if (theta < 0.0) theta += kPi;
    if (theta >= kPi) theta -= kPi;
    return theta;
}

// Difference between undirected angles, in [0, pi/2].
double angle_difference(double a, double b) {
    const double d = wrap_pi(std::abs(a - b));
    return d > kPi / 2 ? kPi - d : d;
}

}  // namespace

void EdgeBoxParams::validate() const {
    if (n_boxes < 1) throw ParameterError("n_boxes must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
    if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("beta must lie in (0, 1)");
    if (!(kappa >= 1.0)) throw ParameterError("kappa must be at least 1");
    if (!(edge_threshold >= 0.0 && edge_threshold <= 1.0)) {
        throw ParameterError("edge threshold must lie in [0, 1]");
    }
    if (!(affinity_gamma > 0.0)) throw ParameterError("affinity exponent must be positive");
    if (!(affinity_radius >= 0.0)) throw ParameterError("affinity radius must be nonnegative");
    if (!(chain_cutoff >= 0.0 && chain_cutoff < 1.0)) {
        throw ParameterError("chain cutoff must lie in [0, 1)");
    }
    if (!(min_box_side_fraction > 0.0 && min_box_side_fraction <= 1.0)) {
        throw ParameterError("min box side fraction must lie in (0, 1]");
    }
}

std::vector<double> EdgeBoxParams::aspect_ratios() {
    std::vector<double> ratios;
    for (int i = -3; i <= 3; ++i) {
        ratios.push_back(std::pow(3.0, i / 3.0));
    }
    return ratios;
}

EdgeMap detect_edges(const ImageBuffer& img, double threshold) {
    const int w = img.width();
    const int h = img.height();
    std::vector<double> luma(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < luma.size(); ++i) {
        const Rgb& p = img.pixels()[i];
        luma[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
    auto at = [&](int x, int y) {
        return luma[static_cast<std::size_t>(std::clamp(y, 0, h - 1)) * w + std::clamp(x, 0, w - 1)];
    };

    EdgeMap out{w, h, std::vector<double>(luma.size()), std::vector<double>(luma.size())};
    double max_mag = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = (at(x + 1, y - 1) + 2 * at(x + 1, y) + at(x + 1, y + 1)) -
                              (at(x - 1, y - 1) + 2 * at(x - 1, y) + at(x - 1, y + 1));
            const double gy = (at(x - 1, y + 1) + 2 * at(x, y + 1) + at(x + 1, y + 1)) -
                              (at(x - 1, y - 1) + 2 * at(x, y - 1) + at(x + 1, y - 1));
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            out.magnitude[i] = std::sqrt(gx * gx + gy * gy);
            out.orientation[i] = wrap_pi(std::atan2(gy, gx));
            max_mag = std::max(max_mag, out.magnitude[i]);
        }
    }
    if (max_mag > 0.0) {
        for (double& m : out.magnitude) {
            m /= max_mag;
            if (m < threshold) m = 0.0;
        }
    }
    return out;
}

std::vector<EdgeGroup> group_edges(const EdgeMap& edges) {
    const int w = edges.width;
    const int h = edges.height;
    std::vector<int> owner(static_cast<std::size_t>(w) * h, -1);
    std::vector<EdgeGroup> groups;

    struct Frontier {
        double cost;
        int pixel;
        bool operator>(const Frontier& o) const {
            return cost != o.cost ? cost > o.cost : pixel > o.pixel;
        }
    };

    for (int seed = 0; seed < w * h; ++seed) {
        if (owner[seed] >= 0 || edges.magnitude[seed] <= 0.0) continue;

        EdgeGroup g;
        g.id = static_cast<int>(groups.size());
        std::priority_queue<Frontier, std::vector<Frontier>, std::greater<>> frontier;
        double spent = 0.0;

        auto absorb = [&](int p) {
            owner[p] = g.id;
            const int px = p % w;
            const int py = p / w;
            g.pixels.push_back({px, py});
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = px + dx;
                    const int ny = py + dy;
                    if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    const int q = ny * w + nx;
                    if (owner[q] >= 0 || edges.magnitude[q] <= 0.0) continue;
                    frontier.push({angle_difference(edges.orientation[p], edges.orientation[q]), q});
                }
            }
        };

        absorb(seed);
        while (!frontier.empty()) {
            const Frontier next = frontier.top();
            if (owner[next.pixel] >= 0) {
                frontier.pop();
                continue;
            }
            if (spent + next.cost >= kPi / 2) break;
            frontier.pop();
            spent += next.cost;
            absorb(next.pixel);
        }

        double sum_c = 0.0;
        double sum_s = 0.0;
        int x0 = w, y0 = h, x1 = -1, y1 = -1;
        for (const PixelPos& p : g.pixels) {
            const std::size_t i = static_cast<std::size_t>(p.y) * w + p.x;
            const double m = edges.magnitude[i];
            g.mass += m;
            g.mean_x += m * p.x;
            g.mean_y += m * p.y;
            sum_c += m * std::cos(2.0 * edges.orientation[i]);
            sum_s += m * std::sin(2.0 * edges.orientation[i]);
            x0 = std::min(x0, p.x);
            y0 = std::min(y0, p.y);
            x1 = std::max(x1, p.x);
            y1 = std::max(y1, p.y);
        }
        g.mean_x /= g.mass;
        g.mean_y /= g.mass;
        g.mean_orientation = wrap_pi(0.5 * std::atan2(sum_s, sum_c));
        g.bbox = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
        groups.push_back(std::move(g));
    }
    return groups;
}

double group_affinity(const EdgeGroup& a, const EdgeGroup& b, const EdgeBoxParams& params) {
    const double dx = b.mean_x - a.mean_x;
    const double dy = b.mean_y - a.mean_y;
    const double dist = std::hypot(dx, dy);
    if (dist > params.affinity_radius) return 0.0;
    const double theta_ab = dist > 0.0 ? wrap_pi(std::atan2(dy, dx)) : a.mean_orientation;
    const double c = std::cos(a.mean_orientation - theta_ab) * std::cos(b.mean_orientation - theta_ab);
    return std::pow(std::abs(c), params.affinity_gamma);
}

EdgeGraph build_edge_graph(const EdgeMap& edges, const EdgeBoxParams& params) {
    EdgeGraph graph;
    graph.width = edges.width;
    graph.height = edges.height;
    graph.groups = group_edges(edges);
    graph.links.resize(graph.groups.size());

    // Bucket mean positions so only nearby pairs are tested.
    const double cell = std::max(1.0, params.affinity_radius);
    std::map<std::pair<long, long>, std::vector<int>> buckets;
    auto key = [&](const EdgeGroup& g) {
        return std::pair<long, long>{static_cast<long>(std::floor(g.mean_x / cell)),
                                     static_cast<long>(std::floor(g.mean_y / cell))};
    };
    for (const EdgeGroup& g : graph.groups) buckets[key(g)].push_back(g.id);

    for (const EdgeGroup& a : graph.groups) {
        const auto [cx, cy] = key(a);
        for (long by = cy - 1; by <= cy + 1; ++by) {
            for (long bx = cx - 1; bx <= cx + 1; ++bx) {
                const auto it = buckets.find({bx, by});
                if (it == buckets.end()) continue;
                for (int other : it->second) {
                    if (other <= a.id) continue;
                    const double aff = group_affinity(a, graph.groups[other], params);
                    if (aff > 0.0) {
                        graph.links[a.id].push_back({other, aff});
                        graph.links[other].push_back({a.id, aff});
                    }
                }
            }
        }
    }
    for (auto& l : graph.links) {
        std::sort(l.begin(), l.end(), [](const AffinityLink& p, const AffinityLink& q) { return p.to < q.to; });
    }
    return graph;
}

EdgeGraph build_edge_graph(const ImageBuffer& img, const EdgeBoxParams& params) {
    return build_edge_graph(detect_edges(img, params.edge_threshold), params);
}

namespace {

bool strictly_inside(const BoundingBox& group, const BoundingBox& box) {
    return group.x > box.x && group.y > box.y && group.right() < box.right() &&
           group.bottom() < box.bottom();
}

// Best affinity-chain product from each inside group to any group that is
// not inside; chains at or below the cutoff count as zero.
std::map<int, double> chain_strengths(const std::vector<int>& linked_inside,
                                      const std::vector<char>& inside, const EdgeGraph& graph,
                                      const EdgeBoxParams& params) {
    std::map<int, double> best;
    struct Item {
        double strength;
        int group;
        bool operator<(const Item& o) const {
            return strength != o.strength ? strength < o.strength : group > o.group;
        }
    };
    std::priority_queue<Item> queue;
    for (int g : linked_inside) {
        for (const AffinityLink& link : graph.links[g]) {
            if (inside[link.to]) continue;
            if (link.affinity > params.chain_cutoff && link.affinity > best[g]) {
                best[g] = link.affinity;
                queue.push({link.affinity, g});
            }
        }
    }
    while (!queue.empty()) {
        const Item item = queue.top();
        queue.pop();
        if (item.strength < best[item.group]) continue;
        for (const AffinityLink& link : graph.links[item.group]) {
            if (!inside[link.to]) continue;
            const double s = item.strength * link.affinity;
            if (s > params.chain_cutoff && s > best[link.to]) {
                best[link.to] = s;
                queue.push({s, link.to});
            }
        }
    }
    return best;
}

}  // namespace

double score_box(const BoundingBox& box, const EdgeGraph& graph, const EdgeBoxParams& params) {
    std::vector<int> inside_ids;
    std::vector<int> linked_inside;
    for (const EdgeGroup& g : graph.groups) {
        if (strictly_inside(g.bbox, box)) {
            inside_ids.push_back(g.id);
            if (!graph.links[g.id].empty()) linked_inside.push_back(g.id);
        }
    }
    if (inside_ids.empty()) return 0.0;

    std::map<int, double> chains;
    if (!linked_inside.empty()) {
        std::vector<char> inside(graph.groups.size(), 0);
        for (int g : inside_ids) inside[g] = 1;
        chains = chain_strengths(linked_inside, inside, graph, params);
    }

    double total = 0.0;
    for (int g : inside_ids) {
        double weight = 1.0;
        if (const auto it = chains.find(g); it != chains.end()) weight = 1.0 - it->second;
        total += weight * graph.groups[g].mass;
    }
    const double perimeter = 2.0 * (box.w + box.h);
    return total / std::pow(perimeter, params.kappa);
}

std::vector<BoundingBox> generate_candidates(int width, int height, const EdgeBoxParams& params) {
    params.validate();
    std::vector<BoundingBox> out;
    const int min_side = std::max(
        1, static_cast<int>(std::lround(params.min_box_side_fraction * std::min(width, height))));
    if (width < min_side || height < min_side) return out;

    std::set<BoundingBox> seen;
    auto emit = [&](const BoundingBox& b) {
        if (seen.insert(b).second) out.push_back(b);
    };

    const double scale_step = 1.0 / std::sqrt(params.alpha);
    const double slide = (1.0 - params.alpha) / (1.0 + params.alpha);
    for (double ratio : EdgeBoxParams::aspect_ratios()) {
        int last_w = -1;
        int last_h = -1;
        for (int j = 0;; ++j) {
            const double side = min_side * std::pow(scale_step, j);
            const int bw = static_cast<int>(std::lround(side * std::max(ratio, 1.0)));
            const int bh = static_cast<int>(std::lround(side * std::max(1.0 / ratio, 1.0)));
            if (bw > width || bh > height) break;
            if (bw == last_w && bh == last_h) continue;
            last_w = bw;
            last_h = bh;
            const int sx = std::max(1, static_cast<int>(std::lround(bw * slide)));
            const int sy = std::max(1, static_cast<int>(std::lround(bh * slide)));
            for (int y = 0; y + bh <= height; y += sy) {
                for (int x = 0; x + bw <= width; x += sx) {
                    emit({x, y, bw, bh});
                }
            }
        }
    }
    emit({0, 0, width, height});
    return out;
}

std::vector<ScoredBox> nms(const std::vector<ScoredBox>& ranked, double beta, std::size_t limit) {
    if (!std::is_sorted(ranked.begin(), ranked.end(), ranks_before)) {
        throw ParameterError("nms input must be sorted by score");
    }
    std::vector<ScoredBox> kept;
    for (const ScoredBox& candidate : ranked) {
        if (limit > 0 && kept.size() >= limit) break;
        const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const ScoredBox& k) {
            return iou(k.box, candidate.box) >= beta;
        });
        if (!suppressed) kept.push_back(candidate);
    }
    return kept;
}

std::vector<ScoredBox> rank_boxes(const std::vector<BoundingBox>& boxes, const EdgeGraph& graph,
                                  const EdgeBoxParams& params, std::size_t n_boxes) {
    std::vector<ScoredBox> scored;
    scored.reserve(boxes.size());
    for (const BoundingBox& b : boxes) {
        scored.push_back({b, score_box(b, graph, params)});
    }
    sort_proposals(scored);
    return nms(scored, params.beta, n_boxes);
}

EdgeBoxesResult edgeboxes_ranked(const ImageBuffer& img, const EdgeBoxParams& params) {
    params.validate();
    const EdgeGraph graph = build_edge_graph(img, params);
    const std::vector<BoundingBox> candidates = generate_candidates(img.width(), img.height(), params);

    EdgeBoxesResult out;
    out.boxes_scored = candidates.size();
    out.proposals.boxes = rank_boxes(candidates, graph, params, params.n_boxes);
    return out;
}

ProposalSet edgeboxes(const ImageBuffer& img, const EdgeBoxParams& params) {
    return edgeboxes_ranked(img, params).proposals;
}

}  // namespace proposalbench
