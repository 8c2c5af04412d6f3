# Interpolant, posterior weights and candidate providers
