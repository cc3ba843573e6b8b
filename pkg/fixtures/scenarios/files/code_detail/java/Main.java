public class Main {
    public static void main(String[] args) {
        Shape[] shapes = {new Circle(2.0), new Triangle(3.0, 4.0, 5.0)};
        for (Shape shape : shapes) {
            System.out.println(
                shape.getClass().getSimpleName()
                    + " area=" + shape.area()
                    + " perimeter=" + shape.perimeter());
        }
    }
}
