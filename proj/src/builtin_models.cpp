#include "sleap/builtin_models.hpp"

#include <array>
#include <fstream>
#include <sstream>

namespace sleap {

namespace {

// Decaying dimerization: S1 decay, reversible dimer formation, conversion.
constexpr std::string_view kDimerNonstiff = R"(# decaying dimerization, non-stiff rate set
species S1 S2 S3
init 4150 39565 3445
reaction R1 : S1 -> 0 ; rate 1
reaction R2 : 2 S1 -> S2 ; rate 0.002
reaction R3 : S2 -> 2 S1 ; rate 0.5
reaction R4 : S2 -> S3 ; rate 0.04
reversible R2 R3
)";

// Same network with the dimer pair driven into partial equilibrium.
constexpr std::string_view kDimerStiff = R"(# decaying dimerization, stiff rate set
species S1 S2 S3
init 4150 39565 3445
reaction R1 : S1 -> 0 ; rate 1
reaction R2 : 2 S1 -> S2 ; rate 10
reaction R3 : S2 -> 2 S1 ; rate 1000
reaction R4 : S2 -> S3 ; rate 0.1
reversible R2 R3
)";

constexpr std::string_view kBsubtilis = R"(# Bacillus subtilis sinI/sinR expression network
species S1 S2 S3
init 300 150 200
reaction R1 : 0 -> S1 + 3 S3 ; rate 0.151
reaction R2 : S1 + S2 -> 4 S3 ; rate 3.1e-4
reaction R3 : S2 -> 4 S3 ; rate 3.4e-3
reaction R4 : S3 -> S1 + S2 ; rate 0.02
reaction R5 : S1 + 2 S2 -> 0 ; rate 6.2e-5
reaction R6 : 2 S1 -> S1 + S2 ; rate 4.9e-4
)";

// LacZ/LacY gene expression in a growing E. coli cell.  RNAP and Ribosome
// pools are redrawn each step from growing normal laws; bimolecular rates
// are rescaled by the growing volume.
constexpr std::string_view kLaczReactions = R"(species PLac RNAP PLacRNAP TrLacZ1 RbsLacZ TrLacZ2 TrLacY1 RbsLacY TrLacY2 Ribosome RbsribosomeLacZ RbsribosomeLacY TrRbsLacZ TrRbsLacY LacZ LacY dgrLacZ dgrLacY dgrRbsLacZ dgrRbsLacY lactose LacZlactose product
reaction R1 : PLac + RNAP -> PLacRNAP ; rate 0.17
reaction R2 : PLacRNAP -> PLac + RNAP ; rate 10
reaction R3 : PLacRNAP -> TrLacZ1 ; rate 1
reaction R4 : TrLacZ1 -> RbsLacZ + PLac + TrLacZ2 ; rate 1
reaction R5 : TrLacZ2 -> TrLacY1 ; rate 0.015
reaction R6 : TrLacY1 -> RbsLacY + TrLacY2 ; rate 1
reaction R7 : TrLacY2 -> RNAP ; rate 0.36
reaction R8 : Ribosome + RbsLacZ -> RbsribosomeLacZ ; rate 0.17
reaction R9 : RbsribosomeLacZ -> Ribosome + RbsLacZ ; rate 0.45
reaction R10 : Ribosome + RbsLacY -> RbsribosomeLacY ; rate 0.17
reaction R11 : RbsribosomeLacY -> Ribosome + RbsLacY ; rate 0.45
reaction R12 : RbsribosomeLacZ -> TrRbsLacZ + RbsLacZ ; rate 0.4
reaction R13 : RbsribosomeLacY -> TrRbsLacY + RbsLacY ; rate 0.4
reaction R14 : TrRbsLacZ -> LacZ ; rate 0.015
reaction R15 : TrRbsLacY -> LacY ; rate 0.036
reaction R16 : LacZ -> dgrLacZ ; rate 6.42e-5
reaction R17 : LacY -> dgrLacY ; rate 6.42e-5
reaction R18 : RbsLacZ -> dgrRbsLacZ ; rate 0.3
reaction R19 : RbsLacY -> dgrRbsLacY ; rate 0.3
reaction R20 : LacZ + lactose -> LacZlactose ; rate 9.52e-5
reaction R21 : LacZlactose -> product + LacZ ; rate 431
reaction R22 : LacY -> lactose + LacY ; rate 14
reversible R1 R2
reversible R8 R9
reversible R10 R11
volume tgen=2100
resample RNAP mean=35 sd=3.5
resample Ribosome mean=350 sd=35
)";

const std::array<std::string_view, 5> kNames = {
    "dimer_nonstiff", "dimer_stiff", "bsubtilis", "lacz_small", "lacz_big"};

std::string lacz_text(bool big) {
  std::ostringstream out;
  out << "# LacZ/LacY expression in a growing cell, "
      << (big ? "large" : "small") << " initial population\n";
  std::string body(kLaczReactions);
  // Insert the init line right after the species line.
  std::size_t eol = body.find('\n');
  out << body.substr(0, eol + 1);
  out << "init";
  out << ' ' << (big ? 100 : 1);  // PLac
  for (int i = 1; i < 23; ++i) out << ' ' << (big ? 50 : 0);
  out << '\n';
  out << body.substr(eol + 1);
  return out.str();
}

const std::string kLaczSmall = lacz_text(false);
const std::string kLaczBig = lacz_text(true);

}  // namespace

std::span<const std::string_view> builtin_model_names() { return kNames; }

std::string_view builtin_model_text(std::string_view name) {
  if (name == "dimer_nonstiff") return kDimerNonstiff;
  if (name == "dimer_stiff") return kDimerStiff;
  if (name == "bsubtilis") return kBsubtilis;
  if (name == "lacz_small") return kLaczSmall;
  if (name == "lacz_big") return kLaczBig;
  throw ModelError("unknown built-in model '" + std::string(name) + "'");
}

ReactionNetwork load_model(const std::string& spec) {
  if (spec.rfind("file:", 0) == 0) {
    const std::string path = spec.substr(5);
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return ReactionNetwork::parse(text.str());
  }
  return ReactionNetwork::parse(builtin_model_text(spec));
}

}  // namespace sleap
