#include <algorithm>
#include <sstream>

#include "biloc/sdp.hpp"

namespace biloc {

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::max_iterations: return "max_iterations";
        case SolveStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

void SdpProblem::normalize() {
    if (static_cast<int32_t>(objective.size()) != nvars) {
        throw InputError("objective length does not match nvars");
    }
    for (auto& blk : blocks) {
        if (blk.size < 1) throw InputError("block size must be positive");
        for (const auto& e : blk.entries) {
            if (e.matno < 0 || e.matno > nvars) throw InputError("entry matno out of range");
            if (e.row < 1 || e.col < 1 || e.row > blk.size || e.col > blk.size) {
                throw InputError("entry index out of block range");
            }
            if (e.row > e.col) throw InputError("entries must satisfy row <= col");
        }
        std::sort(blk.entries.begin(), blk.entries.end(), [](const Entry& a, const Entry& b) {
            return std::tuple(a.matno, a.row, a.col) < std::tuple(b.matno, b.row, b.col);
        });
        for (size_t i = 1; i < blk.entries.size(); ++i) {
            const auto& a = blk.entries[i - 1];
            const auto& b = blk.entries[i];
            if (a.matno == b.matno && a.row == b.row && a.col == b.col) {
                throw InputError("duplicate entry in block");
            }
        }
    }
}

std::string export_sdpa(const SdpProblem& p) {
    std::string out;
    out += std::to_string(p.nvars);
    out += '\n';
    out += std::to_string(p.blocks.size());
    out += '\n';
    for (size_t b = 0; b < p.blocks.size(); ++b) {
        if (b) out += ' ';
        out += std::to_string(p.blocks[b].size);
    }
    out += '\n';
    for (int32_t i = 0; i < p.nvars; ++i) {
        if (i) out += ' ';
        out += format_double(p.objective[static_cast<size_t>(i)]);
    }
    out += '\n';
    for (size_t b = 0; b < p.blocks.size(); ++b) {
        for (const auto& e : p.blocks[b].entries) {
            out += std::to_string(e.matno);
            out += ' ';
            out += std::to_string(b + 1);
            out += ' ';
            out += std::to_string(e.row);
            out += ' ';
            out += std::to_string(e.col);
            out += ' ';
            out += format_double(e.value);
            out += '\n';
        }
    }
    return out;
}

namespace {

struct LineReader {
    const std::string& text;
    size_t pos = 0;
    int line_no = 0;

    bool next(std::string& line) {
        while (pos < text.size()) {
            size_t end = text.find('\n', pos);
            if (end == std::string::npos) end = text.size();
            line = text.substr(pos, end - pos);
            pos = end + 1;
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            // comment lines begin with '"' or '*'
            size_t first = line.find_first_not_of(" \t");
            if (first == std::string::npos) continue;  // blank
            if (line[first] == '"' || line[first] == '*') continue;
            return true;
        }
        return false;
    }
};

std::vector<std::string> tokens_of(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) {
        // tolerate separators used by some writers on the structure lines
        std::string clean;
        for (char c : t) {
            if (c == ',' || c == '(' || c == ')' || c == '{' || c == '}') continue;
            clean += c;
        }
        if (!clean.empty()) toks.push_back(clean);
    }
    return toks;
}

long parse_long(const std::string& tok, int line_no, const char* what) {
    size_t used = 0;
    long v = 0;
    try {
        v = std::stol(tok, &used);
    } catch (...) {
        throw InputError(std::string("sdpa parse: bad ") + what + " at line " +
                         std::to_string(line_no));
    }
    if (used != tok.size()) {
        throw InputError(std::string("sdpa parse: bad ") + what + " at line " +
                         std::to_string(line_no));
    }
    return v;
}

double parse_value(const std::string& tok, int line_no) {
    double v = 0.0;
    if (!parse_double(tok, v)) {
        throw InputError("sdpa parse: bad value at line " + std::to_string(line_no));
    }
    return v;
}

}  // namespace

SdpProblem parse_sdpa(const std::string& text) {
    LineReader rd{text};
    std::string line;

    SdpProblem p;
    if (!rd.next(line)) throw InputError("sdpa parse: unexpected end of input (nvars)");
    {
        auto toks = tokens_of(line);
        if (toks.empty()) throw InputError("sdpa parse: missing variable count");
        p.nvars = static_cast<int32_t>(parse_long(toks[0], rd.line_no, "variable count"));
        if (p.nvars < 0) throw InputError("sdpa parse: negative variable count");
    }
    if (!rd.next(line)) throw InputError("sdpa parse: unexpected end of input (nblocks)");
    long nblocks = 0;
    {
        auto toks = tokens_of(line);
        if (toks.empty()) throw InputError("sdpa parse: missing block count");
        nblocks = parse_long(toks[0], rd.line_no, "block count");
        if (nblocks < 1) throw InputError("sdpa parse: block count must be positive");
    }
    if (!rd.next(line)) throw InputError("sdpa parse: unexpected end of input (block sizes)");
    {
        auto toks = tokens_of(line);
        if (static_cast<long>(toks.size()) != nblocks) {
            throw InputError("sdpa parse: expected " + std::to_string(nblocks) +
                             " block sizes at line " + std::to_string(rd.line_no));
        }
        for (const auto& t : toks) {
            long s = parse_long(t, rd.line_no, "block size");
            // negative sizes denote diagonal blocks in SDPA; this writer
            // never produces them and the solver treats every block as dense
            if (s < 0) s = -s;
            if (s == 0) throw InputError("sdpa parse: block size 0 at line " +
                                         std::to_string(rd.line_no));
            SdpProblem::Block blk;
            blk.size = static_cast<int32_t>(s);
            p.blocks.push_back(std::move(blk));
        }
    }
    // objective: may wrap across lines until nvars values are read
    p.objective.reserve(static_cast<size_t>(p.nvars));
    while (static_cast<int32_t>(p.objective.size()) < p.nvars) {
        if (!rd.next(line)) throw InputError("sdpa parse: unexpected end of input (objective)");
        for (const auto& t : tokens_of(line)) {
            p.objective.push_back(parse_value(t, rd.line_no));
        }
    }
    if (static_cast<int32_t>(p.objective.size()) != p.nvars) {
        throw InputError("sdpa parse: objective has too many values");
    }
    if (p.nvars == 0) {
        // consume the (possibly empty) objective line if present as blank —
        // blanks are already skipped by the reader
    }

    while (rd.next(line)) {
        auto toks = tokens_of(line);
        if (toks.size() != 5) {
            throw InputError("sdpa parse: malformed entry at line " + std::to_string(rd.line_no));
        }
        const long matno = parse_long(toks[0], rd.line_no, "matno");
        const long blkno = parse_long(toks[1], rd.line_no, "block number");
        const long i = parse_long(toks[2], rd.line_no, "row");
        const long j = parse_long(toks[3], rd.line_no, "col");
        const double v = parse_value(toks[4], rd.line_no);
        if (matno < 0 || matno > p.nvars) {
            throw InputError("sdpa parse: matno out of range at line " + std::to_string(rd.line_no));
        }
        if (blkno < 1 || blkno > nblocks) {
            throw InputError("sdpa parse: block number out of range at line " +
                             std::to_string(rd.line_no));
        }
        auto& blk = p.blocks[static_cast<size_t>(blkno - 1)];
        if (i < 1 || j < 1 || i > blk.size || j > blk.size) {
            throw InputError("sdpa parse: index out of block range at line " +
                             std::to_string(rd.line_no));
        }
        if (j < i) {
            throw InputError("sdpa parse: entries must satisfy i <= j (line " +
                             std::to_string(rd.line_no) + ")");
        }
        blk.entries.push_back({static_cast<int32_t>(matno), static_cast<int32_t>(i),
                               static_cast<int32_t>(j), v});
    }
    p.normalize();
    return p;
}

CertifiedBound certify(const SdpProblem& p, const SdpSolution& s) {
    (void)p;
    if (s.status == SolveStatus::numerical_failure) {
        throw SolverError("no certificate from a numerically failed solve");
    }
    CertifiedBound out;
    out.slack = s.dual_residual_l1 * std::max(1.0, s.y_inf_norm);
    out.value = s.dual_objective - out.slack;
    return out;
}

}  // namespace biloc
