#include "geodex/errors.hpp"

namespace geodex {

std::string warning_name(warning_kind k) {
    switch (k) {
        case warning_kind::ambiguous_rank: return "ambiguous-rank";
        case warning_kind::ambiguous_kernel: return "ambiguous-kernel";
        case warning_kind::incomplete_search: return "incomplete-search";
        case warning_kind::conjugate_tangency: return "conjugate-tangency";
        case warning_kind::non_conjugate_fail: return "conjugate-endpoints";
        case warning_kind::truncated_iterate: return "truncated-iterate";
    }
    return "unknown";
}

std::string outcome_name(outcome o) {
    switch (o) {
        case outcome::pass: return "pass";
        case outcome::fail: return "fail";
        case outcome::inconclusive: return "inconclusive";
    }
    return "unknown";
}

}  // namespace geodex
