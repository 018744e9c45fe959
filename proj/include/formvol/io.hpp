#pragma once

// JSON formats for forms, Gram matrices and solver/verification reports.
//
// Form:  {"n": 2, "d": 4, "basis": "monomial" | "rescaled",
//         "terms": [{"alpha": [4, 0], "coeff": 1.0}, ...]}
// Gram:  {"n": 2, "d": 4, "order": "graded-lex", "rows": [[...], ...]}
//
// Gram rows are indexed by the rescaled half-degree monomials. Missing
// terms are zero. Non-finite numbers are written as null.

#include <string>

#include "json.hpp"

#include "formvol/extremal.hpp"
#include "formvol/formcore.hpp"
#include "formvol/norms.hpp"
#include "formvol/sos.hpp"
#include "formvol/volume.hpp"

namespace formvol {

using Json = nlohmann::ordered_json;

Json form_to_json(const Form& f, bool monomial_basis = true);
Form form_from_json(const Json& j);

Json gram_to_json(const GramMatrix& g);
GramMatrix gram_from_json(const Json& j);

Json parse_json(const std::string& text);
Json load_json(const std::string& path);
void save_text(const std::string& path, const std::string& text);

Json to_json(const VolumeEstimate& v);
Json to_json(const NormEstimate& v);
Json to_json(const SolverTrace& t, bool with_trace = true);
Json to_json(const LowerBoundReport& r);
Json to_json(const PStarReport& r);

// Finite doubles as numbers, anything else as null.
Json number(double x);

}  // namespace formvol
