#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace cne {

// Unordered node pair, canonicalized so (i,j) and (j,i) compare equal.
struct NodePair {
    int i;
    int j;

    NodePair(int a, int b) : i(std::min(a, b)), j(std::max(a, b)) {
        if (a == b) throw std::invalid_argument("NodePair: self-pair " + std::to_string(a));
    }

    bool operator==(const NodePair& o) const { return i == o.i && j == o.j; }
    bool operator<(const NodePair& o) const { return i < o.i || (i == o.i && j < o.j); }
};

struct NodePairHash {
    std::size_t operator()(const NodePair& p) const {
        return std::hash<std::uint64_t>()((std::uint64_t(p.i) << 32) | std::uint64_t(p.j));
    }
};

// Undirected simple graph over dense 0-based node ids. Immutable after
// construction. External string tokens are kept for round-tripping output.
class Graph {
public:
    Graph() = default;

    static Graph from_edges(int n, std::vector<NodePair> edge_list,
                            std::vector<std::string> tokens = {}) {
        Graph g;
        g.n_ = n;
        std::sort(edge_list.begin(), edge_list.end());
        edge_list.erase(std::unique(edge_list.begin(), edge_list.end()), edge_list.end());
        for (const auto& e : edge_list) {
            if (e.i < 0 || e.j >= n)
                throw std::out_of_range("edge endpoint out of range: " + std::to_string(e.i) +
                                        "," + std::to_string(e.j));
        }
        g.edges_ = std::move(edge_list);
        g.adj_.assign(n, {});
        for (const auto& e : g.edges_) {
            g.adj_[e.i].push_back(e.j);
            g.adj_[e.j].push_back(e.i);
        }
        for (auto& nbrs : g.adj_) std::sort(nbrs.begin(), nbrs.end());
        if (tokens.empty()) {
            tokens.resize(n);
            for (int v = 0; v < n; ++v) tokens[v] = std::to_string(v);
        } else if (static_cast<int>(tokens.size()) != n) {
            throw std::invalid_argument("token count does not match node count");
        }
        g.tokens_ = std::move(tokens);
        return g;
    }

    int node_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<NodePair>& edges() const { return edges_; }

    const std::vector<int>& neighbors(int i) const {
        check_node(i);
        return adj_[i];
    }

    int degree(int i) const {
        check_node(i);
        return static_cast<int>(adj_[i].size());
    }

    bool has_edge(int i, int j) const {
        check_node(i);
        check_node(j);
        if (i == j) return false;
        const auto& a = adj_[i];
        return std::binary_search(a.begin(), a.end(), j);
    }

    const std::string& token(int i) const {
        check_node(i);
        return tokens_[i];
    }
    const std::vector<std::string>& tokens() const { return tokens_; }

    bool has_blocks() const { return !blocks_.empty(); }
    int block(int i) const {
        check_node(i);
        if (blocks_.empty()) throw std::logic_error("graph has no block assignment");
        return blocks_[i];
    }
    int block_count() const { return num_blocks_; }
    const std::vector<int>& blocks() const { return blocks_; }

    void set_blocks(std::vector<int> blocks, std::vector<std::string> block_tokens = {}) {
        if (static_cast<int>(blocks.size()) != n_)
            throw std::invalid_argument("block assignment must cover every node");
        int hi = -1;
        for (int b : blocks) {
            if (b < 0) throw std::invalid_argument("negative block id");
            hi = std::max(hi, b);
        }
        blocks_ = std::move(blocks);
        num_blocks_ = hi + 1;
        block_tokens_ = std::move(block_tokens);
    }
    const std::vector<std::string>& block_tokens() const { return block_tokens_; }

    bool has_labels() const { return !labels_.empty(); }
    const std::vector<std::vector<int>>& labels() const { return labels_; }
    int label_count() const { return num_labels_; }
    const std::vector<std::string>& label_tokens() const { return label_tokens_; }

    void set_labels(std::vector<std::vector<int>> labels, std::vector<std::string> label_tokens) {
        if (static_cast<int>(labels.size()) != n_)
            throw std::invalid_argument("label table must have one row per node");
        labels_ = std::move(labels);
        for (auto& ls : labels_) {
            std::sort(ls.begin(), ls.end());
            ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
        }
        label_tokens_ = std::move(label_tokens);
        num_labels_ = static_cast<int>(label_tokens_.size());
    }

    // Number of duplicate input lines merged during parsing.
    int merged_duplicates() const { return merged_duplicates_; }

private:
    void check_node(int i) const {
        if (i < 0 || i >= n_)
            throw std::out_of_range("node id " + std::to_string(i) + " out of range [0," +
                                    std::to_string(n_) + ")");
    }

    int n_ = 0;
    std::vector<NodePair> edges_;
    std::vector<std::vector<int>> adj_;
    std::vector<std::string> tokens_;
    std::vector<int> blocks_;
    int num_blocks_ = 0;
    std::vector<std::string> block_tokens_;
    std::vector<std::vector<int>> labels_;
    int num_labels_ = 0;
    std::vector<std::string> label_tokens_;
    int merged_duplicates_ = 0;

    friend Graph load_edge_list(std::istream&);
};

// Parses "token token" lines into a Graph. Tokens are mapped to dense ids in
// first-appearance order; duplicate and reversed-duplicate lines collapse to
// one edge. '#'-prefixed lines and blank lines are skipped.
inline Graph load_edge_list(std::istream& in) {
    std::unordered_map<std::string, int> id_of;
    std::vector<std::string> tokens;
    std::vector<NodePair> edges;
    std::string line;
    int line_no = 0;
    auto intern = [&](const std::string& tok) {
        auto it = id_of.find(tok);
        if (it != id_of.end()) return it->second;
        int id = static_cast<int>(tokens.size());
        id_of.emplace(tok, id);
        tokens.push_back(tok);
        return id;
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string a, b;
        if (!(ls >> a)) continue;
        if (a[0] == '#') continue;
        if (!(ls >> b))
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected two node tokens");
        if (a == b)
            throw std::runtime_error("line " + std::to_string(line_no) + ": self-loop on '" + a +
                                     "'");
        int ia = intern(a);
        int ib = intern(b);
        edges.emplace_back(ia, ib);
    }
    std::size_t raw = edges.size();
    const int n = static_cast<int>(tokens.size());
    Graph g = Graph::from_edges(n, std::move(edges), std::move(tokens));
    g.merged_duplicates_ = static_cast<int>(raw - g.edge_count());
    return g;
}

inline void write_edge_list(const Graph& g, std::ostream& out) {
    for (const auto& e : g.edges()) out << g.token(e.i) << ' ' << g.token(e.j) << '\n';
}

// "node-token block-token" lines; block tokens mapped in first-appearance order.
inline void load_blocks(Graph& g, std::istream& in) {
    std::unordered_map<std::string, int> node_id;
    for (int v = 0; v < g.node_count(); ++v) node_id.emplace(g.token(v), v);
    std::unordered_map<std::string, int> block_id;
    std::vector<std::string> block_tokens;
    std::vector<int> blocks(g.node_count(), -1);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string node, blk;
        if (!(ls >> node)) continue;
        if (node[0] == '#') continue;
        if (!(ls >> blk))
            throw std::runtime_error("block file line " + std::to_string(line_no) +
                                     ": expected node and block tokens");
        auto it = node_id.find(node);
        if (it == node_id.end())
            throw std::runtime_error("block file line " + std::to_string(line_no) +
                                     ": unknown node '" + node + "'");
        auto [bit, fresh] = block_id.try_emplace(blk, static_cast<int>(block_tokens.size()));
        if (fresh) block_tokens.push_back(blk);
        blocks[it->second] = bit->second;
    }
    for (int v = 0; v < g.node_count(); ++v)
        if (blocks[v] < 0)
            throw std::runtime_error("block file missing assignment for node '" + g.token(v) +
                                     "'");
    g.set_blocks(std::move(blocks), std::move(block_tokens));
}

// "node-token label-token" lines, one per node-label incidence.
inline void load_labels(Graph& g, std::istream& in) {
    std::unordered_map<std::string, int> node_id;
    for (int v = 0; v < g.node_count(); ++v) node_id.emplace(g.token(v), v);
    std::unordered_map<std::string, int> label_id;
    std::vector<std::string> label_tokens;
    std::vector<std::vector<int>> labels(g.node_count());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string node, lab;
        if (!(ls >> node)) continue;
        if (node[0] == '#') continue;
        if (!(ls >> lab))
            throw std::runtime_error("label file line " + std::to_string(line_no) +
                                     ": expected node and label tokens");
        auto it = node_id.find(node);
        if (it == node_id.end())
            throw std::runtime_error("label file line " + std::to_string(line_no) +
                                     ": unknown node '" + node + "'");
        auto [lit, fresh] = label_id.try_emplace(lab, static_cast<int>(label_tokens.size()));
        if (fresh) label_tokens.push_back(lab);
        labels[it->second].push_back(lit->second);
    }
    g.set_labels(std::move(labels), std::move(label_tokens));
}

inline bool is_connected(const Graph& g) {
    int n = g.node_count();
    if (n == 0) return true;
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w : g.neighbors(v))
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                q.push(w);
            }
    }
    return count == n;
}

// m distinct non-edges, uniform without replacement, deterministic given seed.
inline std::vector<NodePair> sample_non_edges(const Graph& g, std::size_t m, std::uint64_t seed) {
    const int n = g.node_count();
    const std::size_t total_pairs = std::size_t(n) * (n - 1) / 2;
    const std::size_t non_edges = total_pairs - g.edge_count();
    if (m > non_edges)
        throw std::invalid_argument("requested " + std::to_string(m) + " non-edges but only " +
                                    std::to_string(non_edges) + " exist");
    std::mt19937_64 rng(seed);
    std::vector<NodePair> out;
    out.reserve(m);
    if (m * 3 >= non_edges || non_edges < 1024) {
        // Dense request: enumerate all non-edges and take a random prefix.
        std::vector<NodePair> pool;
        pool.reserve(non_edges);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (!g.has_edge(i, j)) pool.emplace_back(i, j);
        for (std::size_t t = 0; t < m; ++t) {
            std::uniform_int_distribution<std::size_t> pick(t, pool.size() - 1);
            std::swap(pool[t], pool[pick(rng)]);
            out.push_back(pool[t]);
        }
    } else {
        std::unordered_set<NodePair, NodePairHash> taken;
        std::uniform_int_distribution<int> pick(0, n - 1);
        while (out.size() < m) {
            int i = pick(rng), j = pick(rng);
            if (i == j) continue;
            NodePair p(i, j);
            if (g.has_edge(p.i, p.j) || taken.count(p)) continue;
            taken.insert(p);
            out.push_back(p);
        }
    }
    return out;
}

struct SplitResult {
    Graph train;
    std::vector<NodePair> removed;
    bool shortfall = false;  // fewer removals than the target were feasible
};

// Removes up to floor(fraction * |E|) edges, visiting edges in seeded random
// order and skipping any removal that would disconnect the train graph.
inline SplitResult connected_split(const Graph& g, double fraction, std::uint64_t seed) {
    if (fraction <= 0.0 || fraction >= 1.0)
        throw std::invalid_argument("fraction must be in (0,1)");
    if (!is_connected(g)) throw std::invalid_argument("connected_split requires a connected graph");

    const int n = g.node_count();
    std::vector<NodePair> order = g.edges();
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    const std::size_t target = static_cast<std::size_t>(fraction * double(g.edge_count()));
    std::vector<std::unordered_set<int>> adj(n);
    for (const auto& e : g.edges()) {
        adj[e.i].insert(e.j);
        adj[e.j].insert(e.i);
    }

    // BFS from i, early exit on reaching j.
    std::vector<int> seen(n, 0);
    int stamp = 0;
    std::vector<int> queue_buf;
    auto reachable = [&](int from, int to) {
        ++stamp;
        queue_buf.clear();
        queue_buf.push_back(from);
        seen[from] = stamp;
        for (std::size_t head = 0; head < queue_buf.size(); ++head) {
            int v = queue_buf[head];
            if (v == to) return true;
            for (int w : adj[v])
                if (seen[w] != stamp) {
                    seen[w] = stamp;
                    queue_buf.push_back(w);
                }
        }
        return false;
    };

    std::vector<NodePair> removed;
    for (const auto& e : order) {
        if (removed.size() >= target) break;
        adj[e.i].erase(e.j);
        adj[e.j].erase(e.i);
        if (reachable(e.i, e.j)) {
            removed.push_back(e);
        } else {
            adj[e.i].insert(e.j);
            adj[e.j].insert(e.i);
        }
    }

    std::vector<NodePair> kept;
    kept.reserve(g.edge_count() - removed.size());
    std::unordered_set<NodePair, NodePairHash> removed_set(removed.begin(), removed.end());
    for (const auto& e : g.edges())
        if (!removed_set.count(e)) kept.push_back(e);

    SplitResult res;
    res.train = Graph::from_edges(n, std::move(kept), g.tokens());
    if (g.has_blocks()) res.train.set_blocks(g.blocks(), g.block_tokens());
    res.removed = std::move(removed);
    res.shortfall = res.removed.size() < target;
    return res;
}

}  // namespace cne
