#pragma once

#include "wshift/errors.hpp"
#include "wshift/matrix.hpp"
#include "wshift/polar.hpp"
#include "wshift/weight_sequence.hpp"
#include "wshift/banded_operator.hpp"
#include "wshift/shift.hpp"
#include "wshift/column_isometry.hpp"
#include "wshift/equivalence.hpp"
#include "wshift/twodim.hpp"
#include "wshift/gallery.hpp"
#include "wshift/config.hpp"
