state a init { s }
state b {}
edge a b
edge b a
