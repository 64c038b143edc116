#pragma once

#include "mercer/chebapprox.hpp"
#include "mercer/decay.hpp"
#include "mercer/diagnostics.hpp"
#include "mercer/errors.hpp"
#include "mercer/gallery.hpp"
#include "mercer/orthopoly.hpp"
#include "mercer/parallel.hpp"
#include "mercer/skeleton.hpp"
#include "mercer/sve.hpp"
#include "mercer/sve_io.hpp"
