#pragma once
// Reference computations used only by the tests. They deliberately avoid the
// library's own tree algorithms.

#include <algorithm>
#include <string>
#include <vector>

#include "globwb/tree.hpp"

namespace oracle {

// Boundary on tables: lower the maximal entries by one, then merge neighbours
// whose join has become equal to one of them.
inline globwb::DimensionTable table_boundary(globwb::DimensionTable tbl) {
    int top = 0;
    for (int v : tbl.tops) top = std::max(top, v);
    for (int& v : tbl.tops)
        if (v == top) --v;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t k = 0; k < tbl.joins.size(); ++k) {
            if (tbl.tops[k] == tbl.joins[k]) {
                tbl.tops.erase(tbl.tops.begin() + k);
                tbl.joins.erase(tbl.joins.begin() + k);
                changed = true;
                break;
            }
            if (tbl.tops[k + 1] == tbl.joins[k]) {
                tbl.tops.erase(tbl.tops.begin() + k + 1);
                tbl.joins.erase(tbl.joins.begin() + k);
                changed = true;
                break;
            }
        }
    }
    return tbl;
}

// Dyck words of length 2n; a tree on n+1 nodes is "(" child ")" per non-root node.
inline void dyck(int open, int close, int n, std::string& cur, std::vector<std::string>& out) {
    if (open == n && close == n) {
        out.push_back(cur);
        return;
    }
    if (open < n) {
        cur.push_back('(');
        dyck(open + 1, close, n, cur, out);
        cur.pop_back();
    }
    if (close < open) {
        cur.push_back(')');
        dyck(open, close + 1, n, cur, out);
        cur.pop_back();
    }
}

inline std::vector<std::string> dyck_words(int n) {
    std::vector<std::string> out;
    std::string cur;
    dyck(0, 0, n, cur, out);
    return out;
}

// "[" + word with parens replaced + "]" is exactly the bracket grammar
inline std::string word_to_brackets(const std::string& w) {
    std::string s = "[";
    for (char c : w) s.push_back(c == '(' ? '[' : ']');
    s.push_back(']');
    return s;
}

inline std::string tree_word(const globwb::Tree& t) {
    std::string b = globwb::to_string(t);
    std::string w;
    for (std::size_t i = 1; i + 1 < b.size(); ++i) w.push_back(b[i] == '[' ? '(' : ')');
    return w;
}

// Number of ways to obtain `w` by deleting one leaf "()" from a word of length |w|+2.
inline int count_leaf_extensions(const std::string& w) {
    int n = static_cast<int>(w.size()) / 2 + 1;
    int count = 0;
    for (const auto& big : dyck_words(n))
        for (std::size_t p = 0; p + 1 < big.size(); ++p)
            if (big[p] == '(' && big[p + 1] == ')') {
                std::string del = big.substr(0, p) + big.substr(p + 2);
                if (del == w) ++count;
            }
    return count;
}

} // namespace oracle
