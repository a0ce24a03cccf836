// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "hiercpt/bayes_net.hpp"
#include "hiercpt/common.hpp"
#include "hiercpt/dataset.hpp"

namespace hiercpt {

// Conditional mutual information I(Xi; Xj | C) in nats, estimated from
// the smoothed joint frequency table (one pseudo-count spread uniformly
// over the ri*rj*rc cells, so no cell is ever zero).
inline double conditional_mutual_information(const Dataset& ds, int i, int j, int class_var,
                                             double smoothing = 1.0) {
    const int ri = ds.variables[i].cardinality;
    const int rj = ds.variables[j].cardinality;
    const int rc = ds.variables[class_var].cardinality;
    const int cells = ri * rj * rc;
    std::vector<double> joint(cells, smoothing / cells);
    for (int row = 0; row < ds.n_rows(); ++row)
        joint[(ds.code(row, i) * rj + ds.code(row, j)) * rc + ds.code(row, class_var)] += 1.0;
    const double total = ds.n_rows() + smoothing;
    for (double& v : joint) v /= total;

    std::vector<double> pic(ri * rc, 0.0), pjc(rj * rc, 0.0), pc(rc, 0.0);
    for (int a = 0; a < ri; ++a)
        for (int b = 0; b < rj; ++b)
            for (int c = 0; c < rc; ++c) {
                double v = joint[(a * rj + b) * rc + c];
                pic[a * rc + c] += v;
                pjc[b * rc + c] += v;
                pc[c] += v;
            }
    double cmi = 0.0;
    for (int a = 0; a < ri; ++a)
        for (int b = 0; b < rj; ++b)
            for (int c = 0; c < rc; ++c) {
                double v = joint[(a * rj + b) * rc + c];
                cmi += v * std::log(v * pc[c] / (pic[a * rc + c] * pjc[b * rc + c]));
            }
    return cmi;
}

// Tree-augmented naive Bayes structure: maximum-weight spanning tree over
// the features (Chow-Liu with class-conditional mutual information as the
// edge weight), rooted at the lowest-index feature, each feature also
// getting the class as a parent. Ties break on the lexicographic edge
// index so the structure is deterministic.
inline Dag learn_tan(const Dataset& ds, int class_var, double smoothing = 1.0) {
    if (class_var < 0 || class_var >= ds.n_vars())
        throw data_error("learn_tan: class variable id out of range");
    std::vector<int> features;
    for (int v = 0; v < ds.n_vars(); ++v)
        if (v != class_var) features.push_back(v);
    const int f = static_cast<int>(features.size());
    if (f < 2) throw data_error("learn_tan: need at least 2 feature variables");

    struct Edge {
        int a, b;  // indices into `features`, a < b
        double weight;
    };
    std::vector<Edge> edges;
    for (int a = 0; a < f; ++a)
        for (int b = a + 1; b < f; ++b)
            edges.push_back({a, b, conditional_mutual_information(ds, features[a], features[b],
                                                                  class_var, smoothing)});
    std::stable_sort(edges.begin(), edges.end(), [](const Edge& lhs, const Edge& rhs) {
        return lhs.weight > rhs.weight;
    });

    // Kruskal with union-find
    std::vector<int> root(f);
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](int v) {
        while (root[v] != v) v = root[v] = root[root[v]];
        return v;
    };
    std::vector<std::vector<int>> tree_adj(f);
    int taken = 0;
    for (const auto& e : edges) {
        int ra = find(e.a), rb = find(e.b);
        if (ra == rb) continue;
        root[ra] = rb;
        tree_adj[e.a].push_back(e.b);
        tree_adj[e.b].push_back(e.a);
        if (++taken == f - 1) break;
    }

    // orient away from the lowest-index feature
    std::vector<int> feature_parent(f, -1);
    std::vector<bool> visited(f, false);
    std::vector<int> stack{0};
    visited[0] = true;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : tree_adj[v])
            if (!visited[w]) {
                visited[w] = true;
                feature_parent[w] = v;
                stack.push_back(w);
            }
    }

    Dag dag;
    dag.parents.resize(ds.n_vars());
    for (int v = 0; v < ds.n_vars(); ++v) dag.names.push_back(ds.variables[v].name);
    for (int k = 0; k < f; ++k) {
        std::vector<int> ps{class_var};
        if (feature_parent[k] >= 0) ps.push_back(features[feature_parent[k]]);
        std::sort(ps.begin(), ps.end());
        dag.parents[features[k]] = ps;
    }
    return dag;
}

}  // namespace hiercpt
