state a init { p }
state b {}
edge a b
