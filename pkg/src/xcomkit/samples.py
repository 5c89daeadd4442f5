"""Programs used by the examples, the tests and the command line."""

EVEN_LIST = """\
begin
  type Pair is head tail end
  type Nil is end
  value length is 100 end
  value list is new Nil end
  while length > 0 do
    begin
      if length mod 2 = 0
      then
        begin
          value pair is new Pair end
          pair.head := length;
          pair.tail := list;
          list := pair;
        end
      end
      length := length - 1;
    end
  end
end
"""

# Cell is never declared: a static translator rejects it, the others fail
# only when the `new` is reached.
UNKNOWN_TYPE = """\
begin
  value x is 1 end
  value c is new Cell end
  x := 2;
end
"""
