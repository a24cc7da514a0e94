#pragma once

// Everything except the on-disk cache (cache.hpp, which needs libcrypto).

#include "virbound/acceptance.hpp"
#include "virbound/bounds.hpp"
#include "virbound/fields.hpp"
#include "virbound/graded_operator.hpp"
#include "virbound/matrix.hpp"
#include "virbound/partition.hpp"
#include "virbound/scalar.hpp"
#include "virbound/serialize.hpp"
#include "virbound/smear.hpp"
#include "virbound/truncated_rep.hpp"
#include "virbound/verma.hpp"
