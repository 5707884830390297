#pragma once

#include "qso/errors.hpp"
#include "qso/qarith.hpp"
#include "qso/gtbasis.hpp"
#include "qso/reps.hpp"
#include "qso/tensorprod.hpp"
#include "qso/cgc.hpp"
#include "qso/wigner.hpp"
#include "qso/io.hpp"
