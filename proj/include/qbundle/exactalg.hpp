#pragma once

#include "qbundle/error.hpp"
#include "qbundle/exactalg/field.hpp"
#include "qbundle/exactalg/matrix.hpp"
#include "qbundle/exactalg/parse.hpp"
#include "qbundle/exactalg/poly.hpp"
