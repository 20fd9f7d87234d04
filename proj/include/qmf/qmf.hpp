#ifndef QMF_QMF_HPP_
#define QMF_QMF_HPP_

#include "qmf/cascade.hpp"
#include "qmf/design.hpp"
#include "qmf/errors.hpp"
#include "qmf/filterbank.hpp"
#include "qmf/io.hpp"
#include "qmf/laurent.hpp"
#include "qmf/operators.hpp"
#include "qmf/transfer.hpp"

#endif  // QMF_QMF_HPP_
