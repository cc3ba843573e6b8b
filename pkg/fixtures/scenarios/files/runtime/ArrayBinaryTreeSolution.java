// Reference solution for the in-class quiz (instructor upload, kind=SOLUTION).
public class ArrayBinaryTreeSolution {
    private final int[] data;
    private int size;

    public ArrayBinaryTreeSolution(int capacity) {
        data = new int[capacity];
    }

    public void setRoot(int value) {
        data[0] = value;
        if (size == 0) {
            size = 1;
        }
    }

    public int left(int i) {
        return 2 * i + 1;
    }

    public int right(int i) {
        return 2 * i + 2;
    }

    public void setLeft(int i, int value) {
        set(left(i), value);
    }

    public void setRight(int i, int value) {
        set(right(i), value);
    }

    private void set(int index, int value) {
        if (index < 0 || index >= data.length) {
            return;
        }
        data[index] = value;
        if (index + 1 > size) {
            size = index + 1;
        }
    }

    public int get(int i) {
        return data[i];
    }

    public int size() {
        return size;
    }
}
