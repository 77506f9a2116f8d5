state a init { p }
state b {}
edge a b
edge b b
