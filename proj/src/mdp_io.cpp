#include "spibb/mdp_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace spibb {

std::string format_double(double d) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    return buf;
}

void write_mdp(std::ostream& out, const TabularMdp& mdp) {
    out << "mdp " << mdp.n_states << ' ' << mdp.n_actions << ' ' << mdp.initial_state
        << ' ' << format_double(mdp.default_discount) << ' ' << format_double(mdp.r_max)
        << '\n';
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            for (const SuccessorEntry& e : mdp.transitions[s][a])
                out << "t " << s << ' ' << a << ' ' << e.state << ' '
                    << format_double(e.prob) << '\n';
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            if (mdp.enabled(s, a))
                out << "r " << s << ' ' << a << ' ' << format_double(mdp.rewards[s][a])
                    << '\n';
    if (!mdp.state_discount.empty())
        for (int s = 0; s < mdp.n_states; ++s)
            out << "g " << s << ' ' << format_double(mdp.state_discount[s]) << '\n';
}

void write_mdp_file(const std::string& path, const TabularMdp& mdp) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_mdp(out, mdp);
    if (!out) throw IoError("write failed: " + path);
}

namespace {

// Strips comments and yields non-empty lines.
bool next_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::size_t end = line.find_last_not_of(" \t\r");
        if (end == std::string::npos) continue;
        line.erase(end + 1);
        return true;
    }
    return false;
}

} // namespace

TabularMdp read_mdp(std::istream& in) {
    std::string line;
    if (!next_line(in, line)) throw IoError("mdp read: empty input");
    std::istringstream head(line);
    std::string tag;
    TabularMdp m;
    head >> tag >> m.n_states >> m.n_actions >> m.initial_state >> m.default_discount >>
        m.r_max;
    if (tag != "mdp" || head.fail()) throw IoError("mdp read: bad header: " + line);
    if (m.n_states <= 0 || m.n_actions <= 0) throw IoError("mdp read: bad shape");
    m.transitions.assign(m.n_states, std::vector<SparseRow>(m.n_actions));
    m.rewards.assign(m.n_states, std::vector<double>(m.n_actions, 0.0));
    std::vector<double> overrides;

    while (next_line(in, line)) {
        std::istringstream ls(line);
        ls >> tag;
        if (tag == "t") {
            int s, a, t;
            double p;
            ls >> s >> a >> t >> p;
            if (ls.fail() || s < 0 || s >= m.n_states || a < 0 || a >= m.n_actions ||
                t < 0 || t >= m.n_states)
                throw IoError("mdp read: bad transition line: " + line);
            m.transitions[s][a].push_back({t, p});
        } else if (tag == "r") {
            int s, a;
            double r;
            ls >> s >> a >> r;
            if (ls.fail() || s < 0 || s >= m.n_states || a < 0 || a >= m.n_actions)
                throw IoError("mdp read: bad reward line: " + line);
            m.rewards[s][a] = r;
        } else if (tag == "g") {
            int s;
            double g;
            ls >> s >> g;
            if (ls.fail() || s < 0 || s >= m.n_states)
                throw IoError("mdp read: bad discount line: " + line);
            if (overrides.empty()) overrides.assign(m.n_states, m.default_discount);
            overrides[s] = g;
        } else {
            throw IoError("mdp read: unknown line: " + line);
        }
    }
    m.state_discount = std::move(overrides);
    for (auto& per_state : m.transitions)
        for (SparseRow& row : per_state)
            std::sort(row.begin(), row.end(),
                      [](const SuccessorEntry& x, const SuccessorEntry& y) {
                          return x.state < y.state;
                      });
    m.validate();
    return m;
}

TabularMdp read_mdp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    return read_mdp(in);
}

void write_policy(std::ostream& out, const StochasticPolicy& policy) {
    for (int s = 0; s < policy.n_states(); ++s)
        for (int a = 0; a < policy.n_actions(); ++a)
            if (policy.probs[s][a] != 0.0)
                out << "p " << s << ' ' << a << ' ' << format_double(policy.probs[s][a])
                    << '\n';
}

void write_policy_file(const std::string& path, const StochasticPolicy& policy) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_policy(out, policy);
    if (!out) throw IoError("write failed: " + path);
}

StochasticPolicy read_policy(std::istream& in, int n_states, int n_actions) {
    StochasticPolicy pi = StochasticPolicy::zeros(n_states, n_actions);
    std::string line, tag;
    while (next_line(in, line)) {
        std::istringstream ls(line);
        int s, a;
        double p;
        ls >> tag >> s >> a >> p;
        if (tag != "p" || ls.fail() || s < 0 || s >= n_states || a < 0 || a >= n_actions)
            throw IoError("policy read: bad line: " + line);
        pi.probs[s][a] = p;
    }
    return pi;
}

StochasticPolicy read_policy_file(const std::string& path, int n_states, int n_actions) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    return read_policy(in, n_states, n_actions);
}

} // namespace spibb
