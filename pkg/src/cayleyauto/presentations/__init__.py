from .core import (
    FiniteExtensionData,
    FiniteGroupTable,
    GraphAutomaticPresentation,
    GroupWord,
    Nilpotent2Spec,
)
from .builders import (
    abelian_decode,
    abelian_encode,
    bs1n,
    bs_decode,
    bs_encode,
    decode_vector,
    encode_vector,
    fa_abelian_multiplication,
    fg_abelian,
    free_group,
    free_word,
    gamma_free,
    heisenberg,
    nilpotent2,
    semidirect_zn_z,
    ut,
    ut_m,
    wreath_decode,
    wreath_encode,
    wreath_finite_by_z,
    zn,
)
from .combinators import (
    direct_product,
    extend_generator,
    finite_extension,
    free_product,
    restrict_to_regular_subgroup,
    semidirect,
)
