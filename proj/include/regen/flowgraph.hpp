#pragma once

#include "regen/params.hpp"
#include "regen/rational.hpp"
#include "regen/tradeoff.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Information flow graphs for failure/repair histories: a source vertex, an
// in/out vertex pair per storage node joined by a storage-capacity edge, and
// data collectors attached at query time. Min-cuts are computed exactly by
// scaling all rational capacities to integers (LCM of denominators) and
// running Dinic on big integers.

namespace regen::flowgraph {

struct HistoryEvent {
    enum class Kind { Fail, Join };
    Kind kind;
    int node = 0;
    std::vector<int> helpers;  // Join only, size d

    static HistoryEvent fail(int node) { return {Kind::Fail, node, {}}; }
    static HistoryEvent join(int node, std::vector<int> helpers) {
        return {Kind::Join, node, std::move(helpers)};
    }
};

struct RepairHistory {
    std::vector<HistoryEvent> events;

    // One event per line: "fail <id>" or "join <id> <h1,h2,...>".
    static RepairHistory parse(std::istream& in) {
        RepairHistory h;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::istringstream ls(line);
            std::string verb;
            if (!(ls >> verb)) continue;  // blank line
            if (verb == "fail") {
                int id;
                if (!(ls >> id))
                    throw std::invalid_argument("history line " + std::to_string(lineno) +
                                                ": fail needs a node id");
                h.events.push_back(HistoryEvent::fail(id));
            } else if (verb == "join") {
                int id;
                std::string helpers;
                if (!(ls >> id >> helpers))
                    throw std::invalid_argument("history line " + std::to_string(lineno) +
                                                ": join needs a node id and a helper list");
                std::vector<int> hs;
                std::istringstream hss(helpers);
                std::string tok;
                while (std::getline(hss, tok, ',')) {
                    if (tok.empty())
                        throw std::invalid_argument("history line " + std::to_string(lineno) +
                                                    ": empty helper id");
                    hs.push_back(std::stoi(tok));
                }
                h.events.push_back(HistoryEvent::join(id, std::move(hs)));
            } else {
                throw std::invalid_argument("history line " + std::to_string(lineno) +
                                            ": unknown event '" + verb + "'");
            }
        }
        return h;
    }
};

// Newcomer attachment rule. ActiveOnly is the standard family; AnyExisting
// drops the notion of active nodes (newcomers may draw from inactive ones),
// used to probe the generality of the cut bound.
enum class HelperMode { ActiveOnly, AnyExisting };

struct Edge {
    int src = 0;
    int dst = 0;
    Rat cap;              // meaningful when !infinite
    bool infinite = false;
};

struct CutEdge {
    std::string src;
    std::string dst;
    Rat capacity;
};

struct CutResult {
    bool infinite = false;
    Rat value;
    std::vector<CutEdge> cut_edges;
};

struct FeasibilityVerdict {
    bool feasible = false;
    CutResult cut;  // witness when infeasible (and the cut value either way)
};

class InfoFlowGraph {
public:
    static InfoFlowGraph build(const SystemParams& params, const RepairHistory& history,
                               HelperMode mode = HelperMode::ActiveOnly) {
        InfoFlowGraph g(params, mode);
        for (const auto& ev : history.events) g.apply(ev);
        return g;
    }

    InfoFlowGraph(const SystemParams& params, HelperMode mode = HelperMode::ActiveOnly)
        : params_(params), mode_(mode) {
        source_ = add_vertex("S");
        for (int id = 1; id <= params_.n; ++id) {
            add_storage_node(id);
            add_edge(source_, nodes_.at(id).in, Rat(0), true);
            add_edge(nodes_.at(id).in, nodes_.at(id).out, params_.alpha, false);
        }
    }

    void apply(const HistoryEvent& ev) {
        if (ev.kind == HistoryEvent::Kind::Fail) {
            auto it = nodes_.find(ev.node);
            if (it == nodes_.end() || !it->second.active)
                throw std::invalid_argument("fail: node " + std::to_string(ev.node) +
                                            " is not an active node");
            it->second.active = false;
            return;
        }
        if (nodes_.count(ev.node))
            throw std::invalid_argument("join: node id " + std::to_string(ev.node) +
                                        " already exists");
        if (static_cast<int>(ev.helpers.size()) != params_.d)
            throw std::invalid_argument("join: expected " + std::to_string(params_.d) +
                                        " helpers, got " + std::to_string(ev.helpers.size()));
        std::vector<int> seen;
        for (int h : ev.helpers) {
            if (h == ev.node) throw std::invalid_argument("join: node cannot help itself");
            auto it = nodes_.find(h);
            if (it == nodes_.end())
                throw std::invalid_argument("join: helper " + std::to_string(h) +
                                            " does not exist");
            if (mode_ == HelperMode::ActiveOnly && !it->second.active)
                throw std::invalid_argument("join: helper " + std::to_string(h) +
                                            " is inactive");
            if (std::find(seen.begin(), seen.end(), h) != seen.end())
                throw std::invalid_argument("join: duplicate helper " + std::to_string(h));
            seen.push_back(h);
        }
        add_storage_node(ev.node);
        for (int h : ev.helpers) add_edge(nodes_.at(h).out, nodes_.at(ev.node).in, params_.beta, false);
        add_edge(nodes_.at(ev.node).in, nodes_.at(ev.node).out, params_.alpha, false);
    }

    const SystemParams& params() const { return params_; }
    HelperMode mode() const { return mode_; }
    int source_vertex() const { return source_; }
    std::size_t vertex_count() const { return labels_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::string& label(int v) const { return labels_.at(v); }

    bool has_node(int id) const { return nodes_.count(id) != 0; }
    bool is_active(int id) const { return nodes_.at(id).active; }
    int in_vertex(int id) const { return nodes_.at(id).in; }
    int out_vertex(int id) const { return nodes_.at(id).out; }

    std::vector<int> active_nodes() const {
        std::vector<int> out;
        for (const auto& [id, st] : nodes_)
            if (st.active) out.push_back(id);
        return out;
    }

    std::vector<int> all_nodes() const {
        std::vector<int> out;
        for (const auto& [id, st] : nodes_) out.push_back(id);
        return out;
    }

    // Exact s -> DC min-cut for a collector attached to the given storage
    // nodes. Collectors may only sit on active nodes in ActiveOnly mode.
    CutResult min_cut(const std::vector<int>& collector) const {
        validate_collector(collector);

        BigInt scale = 1;
        for (const auto& e : edges_)
            if (!e.infinite) scale = boost::multiprecision::lcm(scale, rat_den(e.cap));

        BigInt finite_sum = 0;
        std::vector<BigInt> caps(edges_.size());
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            if (edges_[i].infinite) continue;
            caps[i] = rat_num(edges_[i].cap) * (scale / rat_den(edges_[i].cap));
            finite_sum += caps[i];
        }
        BigInt inf = finite_sum + 1;

        Dinic dinic(static_cast<int>(labels_.size()) + 1);
        int sink = static_cast<int>(labels_.size());
        for (std::size_t i = 0; i < edges_.size(); ++i)
            dinic.add_edge(edges_[i].src, edges_[i].dst, edges_[i].infinite ? inf : caps[i]);
        for (int id : collector) dinic.add_edge(nodes_.at(id).out, sink, inf);

        BigInt flow = dinic.max_flow(source_, sink);

        CutResult res;
        if (flow >= inf) {
            res.infinite = true;
            return res;
        }
        res.value = Rat(flow, scale);

        auto reachable = dinic.residual_reachable(source_);
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            const auto& e = edges_[i];
            if (e.infinite) continue;
            if (reachable[e.src] && !reachable[e.dst])
                res.cut_edges.push_back({labels_[e.src], labels_[e.dst], e.cap});
        }
        return res;
    }

    // One edge per line: "src dst capacity", capacities as exact fractions,
    // infinite edges as "inf". Collector sets, when given, appear as
    // "out:<id> DC:<j> inf" lines.
    void dump(std::ostream& os,
              const std::vector<std::vector<int>>& collectors = {}) const {
        for (const auto& e : edges_) {
            os << labels_[e.src] << ' ' << labels_[e.dst] << ' ';
            if (e.infinite)
                os << "inf";
            else
                os << rat_to_fraction(e.cap);
            os << '\n';
        }
        for (std::size_t j = 0; j < collectors.size(); ++j)
            for (int id : collectors[j])
                os << "out:" << id << " DC:" << j << " inf\n";
    }

private:
    struct NodeState {
        int in = 0;
        int out = 0;
        bool active = true;
    };

    // Dinic max-flow over big-integer capacities.
    class Dinic {
    public:
        explicit Dinic(int n) : adj_(n), level_(n), iter_(n) {}

        void add_edge(int s, int t, BigInt cap) {
            adj_[s].push_back(static_cast<int>(arcs_.size()));
            arcs_.push_back({t, std::move(cap)});
            adj_[t].push_back(static_cast<int>(arcs_.size()));
            arcs_.push_back({s, BigInt(0)});
        }

        BigInt max_flow(int s, int t) {
            BigInt flow = 0;
            while (bfs(s, t)) {
                std::fill(iter_.begin(), iter_.end(), 0);
                while (true) {
                    BigInt f = dfs(s, t, BigInt(-1));
                    if (f == 0) break;
                    flow += f;
                }
            }
            return flow;
        }

        std::vector<bool> residual_reachable(int s) const {
            std::vector<bool> seen(adj_.size(), false);
            std::queue<int> q;
            q.push(s);
            seen[s] = true;
            while (!q.empty()) {
                int v = q.front();
                q.pop();
                for (int idx : adj_[v]) {
                    const Arc& a = arcs_[idx];
                    if (a.cap > 0 && !seen[a.to]) {
                        seen[a.to] = true;
                        q.push(a.to);
                    }
                }
            }
            return seen;
        }

    private:
        struct Arc {
            int to;
            BigInt cap;
        };

        bool bfs(int s, int t) {
            std::fill(level_.begin(), level_.end(), -1);
            std::queue<int> q;
            level_[s] = 0;
            q.push(s);
            while (!q.empty()) {
                int v = q.front();
                q.pop();
                for (int idx : adj_[v]) {
                    const Arc& a = arcs_[idx];
                    if (a.cap > 0 && level_[a.to] < 0) {
                        level_[a.to] = level_[v] + 1;
                        q.push(a.to);
                    }
                }
            }
            return level_[t] >= 0;
        }

        // f < 0 means unbounded at the root call.
        BigInt dfs(int v, int t, BigInt f) {
            if (v == t) return f;
            for (int& i = iter_[v]; i < static_cast<int>(adj_[v].size()); ++i) {
                int idx = adj_[v][i];
                Arc& a = arcs_[idx];
                if (a.cap <= 0 || level_[a.to] != level_[v] + 1) continue;
                BigInt d = f < 0 ? a.cap : (f < a.cap ? f : a.cap);
                BigInt got = dfs(a.to, t, d);
                if (got > 0) {
                    a.cap -= got;
                    arcs_[idx ^ 1].cap += got;
                    return got;
                }
            }
            return 0;
        }

        std::vector<std::vector<int>> adj_;
        std::vector<Arc> arcs_;
        std::vector<int> level_, iter_;
    };

    int add_vertex(std::string label) {
        labels_.push_back(std::move(label));
        return static_cast<int>(labels_.size()) - 1;
    }

    void add_storage_node(int id) {
        NodeState st;
        st.in = add_vertex("in:" + std::to_string(id));
        st.out = add_vertex("out:" + std::to_string(id));
        st.active = true;
        nodes_.emplace(id, st);
    }

    void add_edge(int s, int t, Rat cap, bool infinite) {
        edges_.push_back({s, t, std::move(cap), infinite});
    }

    void validate_collector(const std::vector<int>& collector) const {
        if (collector.empty()) throw std::invalid_argument("collector must name at least one node");
        for (int id : collector) {
            auto it = nodes_.find(id);
            if (it == nodes_.end())
                throw std::invalid_argument("collector node " + std::to_string(id) +
                                            " does not exist");
            if (mode_ == HelperMode::ActiveOnly && !it->second.active)
                throw std::invalid_argument("collector node " + std::to_string(id) +
                                            " is inactive");
        }
    }

    SystemParams params_;
    HelperMode mode_;
    int source_ = 0;
    std::vector<std::string> labels_;
    std::vector<Edge> edges_;
    std::map<int, NodeState> nodes_;
};

// The cut lower bound of any graph in the family:
// sum_{i=0}^{min(d,k)-1} min((d-i) beta, alpha). Same quantity as the
// system capacity.
inline Rat lemma2_bound(const SystemParams& p) { return tradeoff::capacity(p); }

struct WorstCase {
    InfoFlowGraph graph;
    std::vector<int> collector;
    RepairHistory history;
};

// The layered graph meeting the bound with equality: k newcomers
// n+1..n+k, newcomer n+i drawing from nodes n+i-d..n+i-1, collector on the
// k newcomers. Realized as an ordinary history (oldest node fails before
// each join) so it stays inside the standard family.
inline WorstCase build_worst_case(const SystemParams& p) {
    RepairHistory h;
    for (int i = 1; i <= p.k; ++i) {
        h.events.push_back(HistoryEvent::fail(i));
        std::vector<int> helpers;
        for (int j = p.n + i - p.d; j <= p.n + i - 1; ++j) helpers.push_back(j);
        h.events.push_back(HistoryEvent::join(p.n + i, std::move(helpers)));
    }
    std::vector<int> collector;
    for (int i = 1; i <= p.k; ++i) collector.push_back(p.n + i);
    return {InfoFlowGraph::build(p, h), std::move(collector), std::move(h)};
}

// True iff the collector's min-cut reaches the file size; the witness cut
// is returned either way.
inline FeasibilityVerdict check_reconstruction_feasible(const InfoFlowGraph& g,
                                                        const std::vector<int>& collector) {
    FeasibilityVerdict v;
    v.cut = g.min_cut(collector);
    v.feasible = v.cut.infinite || v.cut.value >= g.params().file_size;
    return v;
}

}  // namespace regen::flowgraph
