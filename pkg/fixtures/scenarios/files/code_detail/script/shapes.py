import math


class Circle:
    def __init__(self, radius):
        self.radius = radius

    def area(self):
        return math.pi * self.radius * self.radius

    def perimeter(self):
        return 2.0 * math.pi * self.radius


class Triangle:
    def __init__(self, a, b, c):
        self.a = a
        self.b = b
        self.c = c

    def area(self):
        s = (self.a + self.b + self.c) / 2.0
        return s

    def perimeter(self):
        return self.a + self.b + self.c


if __name__ == "__main__":
    for shape in (Circle(2.0), Triangle(3.0, 4.0, 5.0)):
        print(type(shape).__name__, "area=", shape.area(), "perimeter=", shape.perimeter())
