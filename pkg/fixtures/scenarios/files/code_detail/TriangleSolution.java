// Reference solution for Assignment 4 (instructor upload, kind=SOLUTION).
public class TriangleSolution {
    private final double a;
    private final double b;
    private final double c;

    public TriangleSolution(double a, double b, double c) {
        this.a = a;
        this.b = b;
        this.c = c;
    }

    public double perimeter() {
        return a + b + c;
    }

    public double area() {
        double s = (a + b + c) / 2.0;
        return Math.sqrt(s * (s - a) * (s - b) * (s - c));
    }
}
