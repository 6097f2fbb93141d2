#include "sacseg/grid_cut.hpp"

#include <algorithm>
#include <deque>

#include "sacseg/error.hpp"

namespace sacseg {

namespace {
constexpr int kDx[4] = {0, 0, -1, 1};  // N S W E
constexpr int kDy[4] = {-1, 1, 0, 0};
}  // namespace

GridCut::GridCut(int width, int height, double smooth)
    : width_(width), height_(height), n_(width * height), smooth_(smooth) {
    if (width <= 0 || height <= 0) {
        throw Error(ErrorKind::ZeroDimension, "grid cut needs a non-empty grid");
    }
    tr_cap_.assign(static_cast<std::size_t>(n_), 0.0);
    cap_.assign(static_cast<std::size_t>(n_) * 4, 0.0);
    for (int p = 0; p < n_; ++p) {
        for (int d = 0; d < 4; ++d) {
            if (neighbor(p, d) >= 0) cap_[static_cast<std::size_t>(4 * p + d)] = smooth_;
        }
    }
    tree_.assign(static_cast<std::size_t>(n_), kFree);
    parent_.assign(static_cast<std::size_t>(n_), kNoParent);
    active_flag_.assign(static_cast<std::size_t>(n_), 0);
}

int GridCut::neighbor(int p, int dir) const {
    const int x = p % width_ + kDx[dir];
    const int y = p / width_ + kDy[dir];
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return -1;
    return y * width_ + x;
}

void GridCut::set_unary(int x, int y, double cost0, double cost1) {
    const auto p = static_cast<std::size_t>(y * width_ + x);
    // Source side = label 1: cutting s->p assigns label 0 and pays cost0.
    const double m = std::min(cost0, cost1);
    flow_ += m;
    tr_cap_[p] = (cost0 - m) - (cost1 - m);
}

bool GridCut::rooted(int p) const {
    int x = p;
    for (;;) {
        const auto par = parent_[static_cast<std::size_t>(x)];
        if (par == kTerminal) return true;
        if (par < 0) return false;
        x = neighbor(x, par);
    }
}

void GridCut::augment(int sp, int tp, int dir) {
    auto cap = [&](int p, int d) -> double& { return cap_[static_cast<std::size_t>(4 * p + d)]; };

    double b = cap(sp, dir);
    for (int x = sp;;) {
        const auto d = parent_[static_cast<std::size_t>(x)];
        if (d == kTerminal) {
            b = std::min(b, tr_cap_[static_cast<std::size_t>(x)]);
            break;
        }
        const int par = neighbor(x, d);
        b = std::min(b, cap(par, reverse(d)));
        x = par;
    }
    for (int x = tp;;) {
        const auto d = parent_[static_cast<std::size_t>(x)];
        if (d == kTerminal) {
            b = std::min(b, -tr_cap_[static_cast<std::size_t>(x)]);
            break;
        }
        b = std::min(b, cap(x, d));
        x = neighbor(x, d);
    }

    cap(sp, dir) -= b;
    cap(tp, reverse(dir)) += b;
    for (int x = sp;;) {
        const auto d = parent_[static_cast<std::size_t>(x)];
        if (d == kTerminal) {
            tr_cap_[static_cast<std::size_t>(x)] -= b;
            if (tr_cap_[static_cast<std::size_t>(x)] <= 0.0) {
                parent_[static_cast<std::size_t>(x)] = kOrphan;
                orphans_.push_back(x);
            }
            break;
        }
        const int par = neighbor(x, d);
        cap(par, reverse(d)) -= b;
        cap(x, d) += b;
        if (cap(par, reverse(d)) <= 0.0) {
            parent_[static_cast<std::size_t>(x)] = kOrphan;
            orphans_.push_back(x);
        }
        x = par;
    }
    for (int x = tp;;) {
        const auto d = parent_[static_cast<std::size_t>(x)];
        if (d == kTerminal) {
            tr_cap_[static_cast<std::size_t>(x)] += b;
            if (tr_cap_[static_cast<std::size_t>(x)] >= 0.0) {
                parent_[static_cast<std::size_t>(x)] = kOrphan;
                orphans_.push_back(x);
            }
            break;
        }
        const int par = neighbor(x, d);
        cap(x, d) -= b;
        cap(par, reverse(d)) += b;
        if (cap(x, d) <= 0.0) {
            parent_[static_cast<std::size_t>(x)] = kOrphan;
            orphans_.push_back(x);
        }
        x = par;
    }
    flow_ += b;
}

void GridCut::adopt(int p) {
    const auto t = tree_[static_cast<std::size_t>(p)];
    auto residual_to_p = [&](int q, int d) {
        // d is the direction from p to q.
        return t == kSource ? cap_[static_cast<std::size_t>(4 * q + reverse(d))] > 0.0
                            : cap_[static_cast<std::size_t>(4 * p + d)] > 0.0;
    };
    for (int d = 0; d < 4; ++d) {
        const int q = neighbor(p, d);
        if (q < 0 || tree_[static_cast<std::size_t>(q)] != t) continue;
        if (residual_to_p(q, d) && rooted(q)) {
            parent_[static_cast<std::size_t>(p)] = d;
            return;
        }
    }
    for (int d = 0; d < 4; ++d) {
        const int q = neighbor(p, d);
        if (q < 0 || tree_[static_cast<std::size_t>(q)] != t) continue;
        if (residual_to_p(q, d) && !active_flag_[static_cast<std::size_t>(q)]) {
            active_flag_[static_cast<std::size_t>(q)] = 1;
            active_.push_back(q);
        }
        if (parent_[static_cast<std::size_t>(q)] == reverse(d)) {
            parent_[static_cast<std::size_t>(q)] = kOrphan;
            orphans_.push_back(q);
        }
    }
    tree_[static_cast<std::size_t>(p)] = kFree;
    parent_[static_cast<std::size_t>(p)] = kNoParent;
}

double GridCut::solve() {
    std::deque<int> queue;
    for (int p = 0; p < n_; ++p) {
        const double tr = tr_cap_[static_cast<std::size_t>(p)];
        if (tr == 0.0) continue;
        tree_[static_cast<std::size_t>(p)] = tr > 0.0 ? kSource : kSink;
        parent_[static_cast<std::size_t>(p)] = kTerminal;
        active_flag_[static_cast<std::size_t>(p)] = 1;
        queue.push_back(p);
    }

    while (!queue.empty()) {
        const int p = queue.front();
        const auto t = tree_[static_cast<std::size_t>(p)];
        if (t == kFree) {
            queue.pop_front();
            active_flag_[static_cast<std::size_t>(p)] = 0;
            continue;
        }
        bool augmented = false;
        for (int d = 0; d < 4 && !augmented; ++d) {
            const int q = neighbor(p, d);
            if (q < 0) continue;
            const bool open = t == kSource ? cap_[static_cast<std::size_t>(4 * p + d)] > 0.0
                                           : cap_[static_cast<std::size_t>(4 * q + reverse(d))] > 0.0;
            if (!open) continue;
            const auto tq = tree_[static_cast<std::size_t>(q)];
            if (tq == kFree) {
                tree_[static_cast<std::size_t>(q)] = t;
                parent_[static_cast<std::size_t>(q)] = reverse(d);
                if (!active_flag_[static_cast<std::size_t>(q)]) {
                    active_flag_[static_cast<std::size_t>(q)] = 1;
                    queue.push_back(q);
                }
            } else if (tq != t) {
                if (t == kSource) {
                    augment(p, q, d);
                } else {
                    augment(q, p, reverse(d));
                }
                augmented = true;
            }
        }
        if (!augmented) {
            queue.pop_front();
            active_flag_[static_cast<std::size_t>(p)] = 0;
            continue;
        }
        while (!orphans_.empty()) {
            const int o = orphans_.back();
            orphans_.pop_back();
            adopt(o);
        }
        for (int a : active_) queue.push_back(a);
        active_.clear();
        // p stays at the front and is scanned again.
    }
    return flow_;
}

std::uint8_t GridCut::label(int x, int y) const {
    return tree_[static_cast<std::size_t>(y * width_ + x)] == kSource ? 1 : 0;
}

std::vector<std::uint8_t> GridCut::labels() const {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(n_));
    for (int p = 0; p < n_; ++p) out[static_cast<std::size_t>(p)] = tree_[static_cast<std::size_t>(p)] == kSource;
    return out;
}

}  // namespace sacseg
