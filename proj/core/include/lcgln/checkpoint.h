#ifndef LCGLN_CHECKPOINT_H_
#define LCGLN_CHECKPOINT_H_

#include <iosfwd>

#include "lcgln/net.h"
#include "lcgln/picnn.h"

namespace lcgln {

// Versioned plain-text parameter dumps. Each record starts with a magic line
// ("lcgln-picnn 1" / "lcgln-densenet 1"), then the architecture header, then
// every parameter block in row-major order printed with 17 significant
// digits so reading back reproduces the doubles exactly.
void WritePicnn(std::ostream& out, const Picnn& model);
Picnn ReadPicnn(std::istream& in);

void WriteDenseNet(std::ostream& out, const DenseNet& net);
DenseNet ReadDenseNet(std::istream& in);

}  // namespace lcgln

#endif  // LCGLN_CHECKPOINT_H_
