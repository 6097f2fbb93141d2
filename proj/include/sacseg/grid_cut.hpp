#pragma once

#include <cstdint>
#include <vector>

namespace sacseg {

/// Binary labelling on a 4-connected grid by min-cut (Boykov-Kolmogorov
/// augmenting paths with search-tree reuse).
///
/// Minimises  sum_p cost_p(x_p) + smooth * #{4-neighbour pairs with x_p != x_q}.
/// Nodes that end up reachable from the source take label 1; ties resolve to 0.
class GridCut {
public:
    GridCut(int width, int height, double smooth);

    /// cost0 is paid when the pixel takes label 0, cost1 for label 1.
    void set_unary(int x, int y, double cost0, double cost1);

    /// Returns the min-cut value (energy offset from normalisation included).
    double solve();

    std::uint8_t label(int x, int y) const;
    std::vector<std::uint8_t> labels() const;

private:
    enum Tree : std::uint8_t { kFree = 0, kSource = 1, kSink = 2 };
    static constexpr std::int32_t kNoParent = -1;
    static constexpr std::int32_t kTerminal = -2;
    static constexpr std::int32_t kOrphan = -3;

    int neighbor(int p, int dir) const;
    static int reverse(int dir) { return dir ^ 1; }
    bool rooted(int p) const;
    void augment(int p, int q, int dir);
    void adopt(int p);

    int width_;
    int height_;
    int n_;
    double smooth_;
    double flow_ = 0.0;
    std::vector<double> tr_cap_;   // >0 residual from source, <0 residual to sink
    std::vector<double> cap_;      // 4 per node, residual p -> neighbour(dir)
    std::vector<std::uint8_t> tree_;
    std::vector<std::int32_t> parent_;  // direction index towards parent, or sentinel
    std::vector<std::uint8_t> active_flag_;
    std::vector<int> active_;
    std::vector<int> orphans_;
};

}  // namespace sacseg
