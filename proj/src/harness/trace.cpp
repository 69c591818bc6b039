#include "shef/harness/trace.hpp"

#include <sstream>
#include <stdexcept>

#include "shef/crypto/rng.hpp"
#include "shef/harness/config_parse.hpp"

namespace shef::harness {

Bytes trace_payload(const TraceOp& op) {
    crypto::DetRng rng(op.payload_seed);
    return rng.bytes(op.len);
}

namespace {

void check_range(const TraceParams& p, uint64_t span) {
    if (p.c_mem == 0) throw std::invalid_argument("trace: c_mem must be nonzero");
    if (span == 0) throw std::invalid_argument("trace: empty address range");
}

}  // namespace

Trace gen_trace(TracePattern pattern, const TraceParams& p, uint64_t seed) {
    crypto::DetRng rng(seed);
    Trace t;
    switch (pattern) {
        case TracePattern::STR: {
            check_range(p, p.chunks);
            for (uint64_t i = 0; i < p.chunks; ++i) {
                TraceOp op;
                op.addr = p.base + i * p.c_mem;
                op.len = p.access_len ? p.access_len : p.c_mem;
                if (p.writes) {
                    op.kind = TraceOpKind::Write;
                    op.payload_seed = rng.u64();
                } else {
                    op.kind = TraceOpKind::Read;
                }
                t.ops.push_back(op);
            }
            break;
        }
        case TracePattern::RA:
        case TracePattern::RMW: {
            uint32_t alen = p.access_len ? p.access_len : 64;
            check_range(p, p.working_set);
            if (p.working_set % alen != 0)
                throw std::invalid_argument("trace: working set not a multiple of access size");
            uint64_t slots = p.working_set / alen;
            for (uint64_t i = 0; i < p.ops; ++i) {
                uint64_t addr = p.base + (rng.u64() % slots) * alen;
                if (pattern == TracePattern::RA) {
                    TraceOp op;
                    op.kind = (rng.u64() & 1) ? TraceOpKind::Write : TraceOpKind::Read;
                    op.addr = addr;
                    op.len = alen;
                    if (op.kind == TraceOpKind::Write) op.payload_seed = rng.u64();
                    t.ops.push_back(op);
                } else {
                    TraceOp rd{TraceOpKind::Read, addr, alen};
                    TraceOp wr{TraceOpKind::Write, addr, alen, rng.u64()};
                    t.ops.push_back(rd);
                    t.ops.push_back(wr);
                }
            }
            break;
        }
        case TracePattern::REG: {
            // Register ping-pong: host writes a value, accelerator echoes it back.
            for (uint64_t i = 0; i < p.ops; ++i) {
                TraceOp wr;
                wr.kind = TraceOpKind::RegWrite;
                wr.reg_idx = uint16_t(i % (p.chunks ? p.chunks : 1));
                wr.reg_val = uint32_t(rng.u64());
                t.ops.push_back(wr);
                TraceOp rd;
                rd.kind = TraceOpKind::RegRead;
                rd.reg_idx = wr.reg_idx;
                t.ops.push_back(rd);
            }
            break;
        }
    }
    return t;
}

Trace gen_mixed_trace(const shield::MemoryRegion& region, uint64_t seed) {
    crypto::DetRng rng(seed);
    TraceParams p;
    p.base = region.base;
    p.c_mem = region.c_mem;
    switch (rng.u64() % 4) {
        case 0: {
            p.chunks = 1 + rng.u64() % std::min<uint64_t>(region.chunk_count(), 32);
            p.writes = (rng.u64() & 1) != 0;
            return gen_trace(TracePattern::STR, p, rng.u64());
        }
        case 1: {
            p.access_len = 64;
            p.working_set = std::min<uint64_t>(region.size, (1 + rng.u64() % 16) * 1024);
            p.ops = 16 + rng.u64() % 48;
            return gen_trace(TracePattern::RA, p, rng.u64());
        }
        case 2: {
            p.access_len = 64;
            p.working_set = std::min<uint64_t>(region.size, (1 + rng.u64() % 8) * 1024);
            p.ops = 8 + rng.u64() % 24;
            return gen_trace(TracePattern::RMW, p, rng.u64());
        }
        default: {
            p.chunks = 4;  // register count
            p.ops = 4 + rng.u64() % 12;
            return gen_trace(TracePattern::REG, p, rng.u64());
        }
    }
}

std::string trace_to_text(const Trace& trace) {
    std::ostringstream out;
    for (const auto& op : trace.ops) {
        switch (op.kind) {
            case TraceOpKind::Read:
                out << "R 0x" << std::hex << op.addr << std::dec << " " << op.len << "\n";
                break;
            case TraceOpKind::Write:
                out << "W 0x" << std::hex << op.addr << std::dec << " " << op.len << " "
                    << op.payload_seed << "\n";
                break;
            case TraceOpKind::RegWrite:
                out << "REG_W " << op.reg_idx << " " << op.reg_val << "\n";
                break;
            case TraceOpKind::RegRead:
                out << "REG_R " << op.reg_idx << "\n";
                break;
            case TraceOpKind::Flush:
                out << "FLUSH\n";
                break;
            case TraceOpKind::Attack:
                out << "# ATTACK ops are scenario-file only\n";
                break;
        }
    }
    return out.str();
}

Trace trace_from_text(const std::string& text) {
    Trace t;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;
        TraceOp op;
        auto next = [&]() {
            std::string tok;
            if (!(ls >> tok)) throw ParseError(line_no, "missing field after " + kind);
            return parse_u64(tok, line_no);
        };
        if (kind == "R") {
            op.kind = TraceOpKind::Read;
            op.addr = next();
            op.len = uint32_t(next());
        } else if (kind == "W") {
            op.kind = TraceOpKind::Write;
            op.addr = next();
            op.len = uint32_t(next());
            op.payload_seed = next();
        } else if (kind == "REG_W") {
            op.kind = TraceOpKind::RegWrite;
            op.reg_idx = uint16_t(next());
            op.reg_val = uint32_t(next());
        } else if (kind == "REG_R") {
            op.kind = TraceOpKind::RegRead;
            op.reg_idx = uint16_t(next());
        } else if (kind == "FLUSH") {
            op.kind = TraceOpKind::Flush;
        } else {
            throw ParseError(line_no, "unknown trace op '" + kind + "'");
        }
        t.ops.push_back(op);
    }
    return t;
}

}  // namespace shef::harness
